"""Eliminate V with inverse physical beam splitters B(T)^-1 = [[c,-is],[-is,c]],
entries tracked exactly in Z[i, sqrt2, sqrt3, sqrt6] / global denominator.
Up to two pi-shifter (row negation) moves allowed.  Strict nnz decrease for BS
moves; depth 12 BS moves total.
"""
import json, math
from itertools import combinations
import numpy as np

def mulmat(coef):
    a,b,c,d = coef
    return np.array([[a,2*b,3*c,6*d],[b,a,3*d,3*c],[c,2*d,a,2*b],[d,c,b,a]], dtype=np.int64)

ANGLES = {"1/2":((0,3,0,0),(0,3,0,0)), "1/4":((3,0,0,0),(0,0,3,0)), "2/3":((0,0,0,2),(0,0,2,0))}
MUL = {k:(mulmat(c), mulmat(s)) for k,(c,s) in ANGLES.items()}
INPUT_MODES = frozenset((0,2,3,5,7,8))
SQ2,SQ3,SQ6 = 2**.5,3**.5,6**.5

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
    arr = np.zeros((10,6,2,4), dtype=np.int64)   # (...,(re,im),coeffs)
    for idx,(coef,d) in enumerate(zip(coefs,dens)):
        i,j = divmod(idx,6)
        arr[i,j,0] = np.asarray(coef)*(den//d)
    return arr, den

def normalize(arr, den):
    g = int(np.gcd.reduce(np.abs(arr), axis=None))
    if g == 0: return arr, 1
    g = math.gcd(g, den)
    if g > 1: arr = arr//g; den //= g
    return arr, den

def bs_move(arr, den, i, j, name):
    mc, ms = MUL[name]
    new = arr * 6
    xiR, xiI = arr[i,:,0], arr[i,:,1]
    xjR, xjI = arr[j,:,0], arr[j,:,1]
    # new_i = c*x_i + (-i s)*x_j ; (-i s)(R+iI) = sI - i sR
    new[i,:,0] = xiR @ mc.T + xjI @ ms.T
    new[i,:,1] = xiI @ mc.T - xjR @ ms.T
    new[j,:,0] = xjR @ mc.T + xiI @ ms.T
    new[j,:,1] = xjI @ mc.T - xiR @ ms.T
    return normalize(new, den*6)

def pi_move(arr, den, m):
    new = arr.copy()
    new[m] = -new[m]
    return new, den

def nnz(arr):
    return int(arr.any(axis=(2,3)).sum())

def sq(coef):
    m = mulmat(tuple(int(x) for x in coef))
    return m @ np.asarray(coef, dtype=np.int64)

def is_goal(arr, den):
    mask = arr.any(axis=(2,3))
    if mask.sum() != 6: return False
    rows = set()
    d2 = np.array([den*den,0,0,0], dtype=np.int64)
    for j in range(6):
        idx = np.flatnonzero(mask[:,j])
        if idx.size != 1: return False
        i = int(idx[0])
        mod2 = sq(arr[i,j,0]) + sq(arr[i,j,1])
        if not np.array_equal(mod2, d2): return False
        rows.add(i)
    return rows == INPUT_MODES

def canon_key(arr, den):
    a = arr.copy()
    for j in range(6):
        col = a[:,j].ravel()
        nz = col[col != 0]
        if nz.size and nz[0] < 0: a[:,j] = -a[:,j]
    cols = sorted(a[:,j].tobytes() for j in range(6))
    return (den, b"".join(cols))

PAIRS = list(combinations(range(10),2))
NODES = 0

def search(arr, den, bs_left, pi_left, path, seen):
    global NODES
    NODES += 1
    if NODES % 500000 == 0: print("nodes", NODES, flush=True)
    n = nnz(arr)
    if n == 6 and is_goal(arr, den): return path
    if bs_left == 0 or n - 6 > bs_left * 6: return None
    key = (canon_key(arr, den), pi_left)
    if seen.get(key, -1) >= bs_left: return None
    seen[key] = bs_left
    moves = []
    for i,j in PAIRS:
        for name in ANGLES:
            new, nden = bs_move(arr, den, i, j, name)
            dn = nnz(new) - n
            if dn < 0:
                moves.append((dn, ("bs", i, j, name), new, nden))
    moves.sort(key=lambda t: t[0])
    for dn, mv, new, nden in moves:
        r = search(new, nden, bs_left-1, pi_left, path+[mv], seen)
        if r is not None: return r
    if pi_left > 0 and (not path or path[-1][0] != "pi"):
        for m in range(10):
            new, nden = pi_move(arr, den, m)
            r = search(new, nden, bs_left, pi_left-1, path+[("pi", m)], seen)
            if r is not None: return r
    return None

def main():
    arr, den = load_v("out/real10_s0.json")
    print("nnz", nnz(arr), "den", den, flush=True)
    res = search(arr, den, 12, 2, [], {})
    if res is not None:
        print("FOUND physical decomposition (reduction order):")
        for s in res: print(s)
        json.dump(res, open("out/decomposition_physical.json","w"))
    else:
        print("none found", NODES)

main()
