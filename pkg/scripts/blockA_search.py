import math, sys, json
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

A = np.zeros((7,3,4), dtype=np.int64)
def put(i,j,t): A[i,j] = np.asarray(t, dtype=np.int64)
put(0,0,(0,0,-2,0)); put(0,1,(0,0,2,0)); put(0,2,(0,0,0,-4))
put(1,0,(6,0,0,0));  put(1,1,(-6,0,0,0))
put(2,0,(6,0,0,0));  put(2,1,(6,0,0,0))
put(3,0,(0,0,0,-2)); put(3,1,(0,0,0,2)); put(3,2,(0,0,4,0))
put(4,0,(-6,0,0,0)); put(4,1,(-6,0,0,0))
DEN = 12
MODES = [1,4,5,6,8,7,9]
TARGET_LOCAL = frozenset((2,4,5))

def is_goal(arr, den):
    m = (arr != 0).any(axis=2)
    rows = set()
    for j in range(3):
        idx = np.flatnonzero(m[:,j])
        if idx.size != 1: return False
        i = int(idx[0]); c = arr[i,j]
        if abs(int(c[0])) != den or c[1] or c[2] or c[3]: return False
        rows.add(i)
    return rows == TARGET_LOCAL

PAIRS = list(combinations(range(7),2))
MOVES = [(i,j,n,o) for i,j in PAIRS for n in ANGLES for o in (1,-1)]

def canon(arr, den):
    a = arr.copy()
    cols = []
    for j in range(3):
        col = a[:,j,:].ravel()
        nzidx = np.flatnonzero(col)
        if nzidx.size and col[nzidx[0]] < 0: a[:,j,:] = -a[:,j,:]
        cols.append(a[:,j,:].tobytes())
    return (den, b"".join(sorted(cols)))

NODES = 0
def dfs(arr, den, depth, path, seen, maxinc):
    global NODES
    NODES += 1
    if NODES % 2000000 == 0: print("nodes", NODES, flush=True)
    if is_goal(arr, den): return path
    if depth == 0: return None
    n = nnz(arr)
    if n - 3 > depth*3: return None
    key = canon(arr, den)
    if seen.get(key, -1) >= depth: return None
    seen[key] = depth
    mask = (arr != 0).any(axis=2)
    cand = []
    for (i,j,name,o) in MOVES:
        if not (mask[i].any() or mask[j].any()): continue
        new, nden = apply_move(arr, den, i, j, name, o)
        dn = nnz(new) - n
        if dn <= maxinc:
            cand.append((dn,i,j,name,o,new,nden))
    cand.sort(key=lambda t: t[0])
    for dn,i,j,name,o,new,nden in cand:
        r = dfs(new,nden,depth-1,path+[(MODES[i],MODES[j],name,o)],seen,maxinc)
        if r is not None: return r
    return None

for maxinc in (1,2,3):
    seen = {}; NODES = 0
    res = dfs(A, DEN, 6, [], seen, maxinc)
    print("maxinc", maxinc, "nodes", NODES, "->", res, flush=True)
    if res:
        json.dump(res, open("out/blockA_moves.json","w")); break
