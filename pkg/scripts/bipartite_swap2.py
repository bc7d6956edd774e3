"""Exact decomposition search with correct phase-parity tracking across swaps.

Moves (reduction order, applied to the exact solution matrix V):
  - Givens(i, j, T, ori): allowed T in {1/2, 1/4, 2/3}; costs 1 BS; imposes the
    parity constraint eff(i) xor eff(j) = 1 where eff(r) = parity(var(r)) ^ off(r).
  - swap(i, j): full row exchange (MZI swap = 2 BS + 1 pi); costs depth 2 and
    one pi; imposes NO constraint; exchanges the rows' phase variables and
    flips both offsets.

Parity model: each physical mode phase is static (quarter-turn units, mod 2
here); a Givens needs odd phase difference; a swap teleports phases across
the pair with a quarter-turn shift each (parity flip).
"""
import json, math, sys
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

# parity DSU over static phase variables (one per original mode)
def find(par, x):
    p = 0
    while par[x][0] != x:
        p ^= par[x][1]; x = par[x][0]
    return x, p

def union_req(par, a, b, req):
    """require parity(a) xor parity(b) == req; None on contradiction."""
    ra, pa = find(par, a)
    rb, pb = find(par, b)
    if ra == rb:
        return par if (pa ^ pb) == req else None
    new = dict(par)
    new[rb] = (ra, pa ^ pb ^ req)
    return new

def state_key(par, var, off):
    """Rows' effective parity classes, root-canonicalized."""
    sig = []
    remap = {}
    for r in range(10):
        root, p = find(par, var[r])
        cid = remap.setdefault(root, len(remap))
        sig.append((cid, p ^ off[r]))
    return tuple(sig)

PAIRS = list(combinations(range(10),2))
NODES = 0

def search(arr, den, depth, path, par, var, off, seen, plat, pis):
    global NODES
    NODES += 1
    if NODES % 1000000 == 0: print("nodes", NODES, flush=True)
    mask = arr.any(axis=2)
    n = int(mask.sum())
    if n == 6 and is_goal(arr, den): return path
    if depth == 0 or n - 6 > depth * 6: return None
    key = (canon_key(arr, den), state_key(par, var, off), plat, pis)
    if seen.get(key, -1) >= depth: return None
    seen[key] = depth
    moves = []
    for i,j in PAIRS:
        req = 1 ^ off[i] ^ off[j]
        npar = union_req(par, var[i], var[j], req)
        if npar is None: continue
        for name in ANGLES:
            for ori in (1,-1):
                new, nden = apply_move(arr, den, i, j, name, ori)
                dn = int(new.any(axis=2).sum()) - n
                if dn < 0 or (dn <= 0 and plat > 0):
                    moves.append((dn,i,j,name,ori,new,nden,npar))
    moves.sort(key=lambda t: t[0])
    for dn,i,j,name,ori,new,nden,npar in moves:
        r = search(new, nden, depth-1, path+[(i,j,name,ori)], npar, var, off,
                   seen, plat - (1 if dn >= 0 else 0), pis)
        if r is not None: return r
    if pis > 0 and depth >= 2:
        for i,j in PAIRS:
            if not (mask[i].any() or mask[j].any()): continue
            new = arr.copy()
            new[[i,j]] = new[[j,i]]
            nvar = list(var); noff = list(off)
            nvar[i], nvar[j] = var[j], var[i]
            noff[i], noff[j] = off[j] ^ 1, off[i] ^ 1
            r = search(new, den, depth-2, path+[(i,j,"swap",1)],
                       par, tuple(nvar), tuple(noff), seen, plat, pis-1)
            if r is not None: return r
    return None

def main():
    plat = int(sys.argv[1]) if len(sys.argv) > 1 else 1
    pis = int(sys.argv[2]) if len(sys.argv) > 2 else 2
    arr, den = load_v("out/real10_s0.json")
    par = {m:(m,0) for m in range(10)}
    var = tuple(range(10))
    off = (0,)*10
    for maxd in (12,):
        print(f"depth {maxd} plat {plat} pis {pis}", flush=True)
        res = search(arr, den, maxd, [], par, var, off, {}, plat, pis)
        if res is not None:
            print("FOUND:")
            for s in res: print(s)
            json.dump(res, open("out/decomposition_swap2.json","w"))
            return
        print("exhausted", maxd, "nodes", NODES, flush=True)

main()
