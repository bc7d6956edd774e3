"""Depth-12 decomposition search restricted to bipartite mode-coupling graphs."""
import json, math
from itertools import combinations
import numpy as np

def mulmat(coef):
    a,b,c,d = coef
    return np.array([[a,2*b,3*c,6*d],[b,a,3*d,3*c],[c,2*d,a,2*b],[d,c,b,a]], dtype=np.int64)

ANGLES = {"1/2":((0,3,0,0),(0,3,0,0)), "1/4":((3,0,0,0),(0,0,3,0)), "2/3":((0,0,0,2),(0,0,2,0))}
MUL = {k:(mulmat(c), mulmat(s)) for k,(c,s) in ANGLES.items()}
INPUT_MODES = frozenset((0,2,3,5,7,8))

def normalize(arr, den):
    g = int(np.gcd.reduce(np.abs(arr), axis=None))
    if g == 0: return arr, 1
    g = math.gcd(g, den)
    if g > 1: arr = arr // g; den //= g
    return arr, den

def apply_move(arr, den, i, j, name, ori):
    mc, ms = MUL[name]
    if ori < 0: ms = -ms
    new = arr * 6
    new[i] = arr[i] @ mc.T + arr[j] @ ms.T
    new[j] = arr[j] @ mc.T - arr[i] @ ms.T
    return normalize(new, den*6)

SQ2,SQ3,SQ6 = 2**.5, 3**.5, 6**.5
def from_float(v, tol=1e-6):
    for ri, r in enumerate((1.0, SQ2, SQ3, SQ6)):
        for den in (1,2,3,4,6,8,12):
            num = v / r * den
            if abs(num-round(num)) < tol*den and abs(round(num)) <= 12:
                coef = [0,0,0,0]; coef[ri] = int(round(num))
                return coef, den
    raise ValueError(v)

def load_v(path):
    hits = json.load(open(path))["hits"]
    m = np.asarray(hits[0]).reshape(10,6)
    q,r = np.linalg.qr(m)
    vf = q * np.sign(np.diag(r))[None,:]
    coefs, dens = zip(*[from_float(x) for x in vf.ravel()])
    den = math.lcm(*dens)
    arr = np.zeros((10,6,4), dtype=np.int64)
    for idx,(coef,d) in enumerate(zip(coefs,dens)):
        i,j = divmod(idx,6)
        arr[i,j] = np.asarray(coef)*(den//d)
    return arr, den

def canon_key(arr, den):
    a = arr.copy()
    for j in range(6):
        col = a[:,j,:].ravel()
        nz = col[col != 0]
        if nz.size and nz[0] < 0: a[:,j,:] = -a[:,j,:]
    cols = sorted(a[:,j,:].tobytes() for j in range(6))
    return (den, b"".join(cols))

def is_goal(arr, den):
    mask = arr.any(axis=2)
    if mask.sum() != 6: return False
    rows = set()
    for j in range(6):
        idx = np.flatnonzero(mask[:,j])
        if idx.size != 1: return False
        i = int(idx[0]); coef = arr[i,j]
        if abs(int(coef[0])) != den or coef[1] or coef[2] or coef[3]: return False
        rows.add(i)
    return rows == INPUT_MODES

# parity DSU over 10 modes
def find(par, x):
    p = 0
    while par[x][0] != x:
        p ^= par[x][1]; x = par[x][0]
    return x, p

def union(par, i, j):
    """require color(i) != color(j); return new DSU or None if odd cycle"""
    ri, pi = find(par, i)
    rj, pj = find(par, j)
    if ri == rj:
        return par if (pi ^ pj) == 1 else None
    new = dict(par)
    new[rj] = (ri, pi ^ pj ^ 1)
    return new

def dsu_key(par):
    out = []
    for m in range(10):
        r, p = find(par, m)
        out.append((r, p))
    return tuple(out)

PAIRS = list(combinations(range(10),2))
NODES = 0

def search(arr, den, depth, path, par, seen, plat):
    global NODES
    NODES += 1
    if NODES % 500000 == 0: print("nodes", NODES, flush=True)
    mask = arr.any(axis=2)
    n = int(mask.sum())
    if n == 6 and is_goal(arr, den): return path
    if depth == 0 or n - 6 > depth * 6: return None
    key = (canon_key(arr, den), dsu_key(par), plat)
    if seen.get(key, -1) >= depth: return None
    seen[key] = depth
    moves = []
    for i,j in PAIRS:
        npar = union(par, i, j)
        if npar is None: continue
        if not (mask[i].any() and mask[j].any()):
            # a move on a pair with an all-zero row can't reduce nnz;
            # still allowed in general, but strict-decrease filter removes it anyway
            pass
        for name in ANGLES:
            for ori in (1,-1):
                new, nden = apply_move(arr, den, i, j, name, ori)
                dn = int(new.any(axis=2).sum()) - n
                if dn < 0 or (dn <= 0 and plat > 0):
                    moves.append((dn,i,j,name,ori,new,nden,npar))
    moves.sort(key=lambda t: t[0])
    for dn,i,j,name,ori,new,nden,npar in moves:
        r = search(new, nden, depth-1, path+[(i,j,name,ori)], npar, seen, plat - (1 if dn >= 0 else 0))
        if r is not None: return r
    return None

def main():
    arr, den = load_v("out/real10_s0.json")
    par = {m:(m,0) for m in range(10)}
    for maxd in (12,):
        print("depth", maxd, flush=True)
        res = search(arr, den, maxd, [], par, {}, int(__import__("sys").argv[1]))
        if res is not None:
            print("FOUND bipartite:")
            for s in res: print(s)
            json.dump(res, open("out/decomposition_bip_plateau.json","w"))
            return
        print("exhausted", maxd, "nodes", NODES, flush=True)

main()
