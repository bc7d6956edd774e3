import math, json
from itertools import combinations
import numpy as np

def mulmat(coef):
    a,b,c,d = coef
    return np.array([[a,2*b,3*c,6*d],[b,a,3*d,3*c],[c,2*d,a,2*b],[d,c,b,a]], dtype=np.int64)

ANGLES = {"1/2":((0,3,0,0),(0,3,0,0)), "1/4":((3,0,0,0),(0,0,3,0)), "2/3":((0,0,0,2),(0,0,2,0))}
MUL = {k:(mulmat(c), mulmat(s)) for k,(c,s) in ANGLES.items()}

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

def nnz(arr): return int((arr != 0).any(axis=2).sum())

B = np.zeros((5,3,4), dtype=np.int64)
def put(i,j,t): B[i,j] = np.asarray(t, dtype=np.int64)
put(0,0,(6,0,0,0)); put(0,2,(6,0,0,0))
put(1,0,(0,0,2,0)); put(1,1,(0,0,0,-4)); put(1,2,(0,0,-2,0))
put(2,0,(-6,0,0,0)); put(2,2,(6,0,0,0))
put(3,0,(0,0,0,2)); put(3,1,(0,0,4,0)); put(3,2,(0,0,0,-2))
put(4,0,(-6,0,0,0)); put(4,2,(-6,0,0,0))
DEN = 12
MODES = [0,2,3,7,9]
INPUTS = {0,1,2,3}

def endpoint_set(arr, den):
    m = (arr != 0).any(axis=2)
    rows = set()
    for j in range(3):
        idx = np.flatnonzero(m[:,j])
        if idx.size != 1: return None
        i = int(idx[0]); c = arr[i,j]
        if abs(int(c[0])) != den or c[1] or c[2] or c[3]: return None
        rows.add(i)
    return frozenset(rows) if rows <= INPUTS else None

PAIRS = list(combinations(range(5),2))
MOVES = [(i,j,n,o) for i,j in PAIRS for n in ANGLES for o in (1,-1)]

sols = {}
def dfs(arr, den, depth, path):
    ep = endpoint_set(arr, den)
    if ep is not None:
        sols.setdefault(ep, []).append(list(path))
        return
    if depth == 0: return
    n = nnz(arr)
    if n - 3 > depth*3: return
    for (i,j,name,o) in MOVES:
        new, nden = apply_move(arr, den, i, j, name, o)
        if nnz(new) - n <= 2:
            dfs(new, nden, depth-1, path+[(MODES[i],MODES[j],name,o)])

dfs(B, DEN, 4, [])
for ep, lst in sols.items():
    print("endpoints", sorted(MODES[i] for i in ep), "count", len(lst), "example", lst[0])
json.dump({",".join(str(MODES[i]) for i in sorted(ep)): lst for ep, lst in sols.items()},
          open("out/blockB_sols.json","w"))
