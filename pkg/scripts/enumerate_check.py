"""Enumerate all strictly-decreasing 12-move real Givens reductions of V and
check each for Z4 phase-label consistency (physical realizability with
i-convention beam splitters and <=2 pi shifters)."""
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
    arr = np.zeros((10,6,4), dtype=np.int64)
    for idx,(coef,d) in enumerate(zip(coefs,dens)):
        i,j = divmod(idx,6)
        arr[i,j] = np.asarray(coef)*(den//d)
    return arr, den

def normalize(arr, den):
    g = int(np.gcd.reduce(np.abs(arr), axis=None))
    if g == 0: return arr, 1
    g = math.gcd(g, den)
    if g > 1: arr = arr//g; den //= g
    return arr, den

def apply_move(arr, den, i, j, name, ori):
    mc, ms = MUL[name]
    if ori < 0: ms = -ms
    new = arr * 6
    new[i] = arr[i] @ mc.T + arr[j] @ ms.T
    new[j] = arr[j] @ mc.T - arr[i] @ ms.T
    return normalize(new, den*6)

def is_goal(arr, den):
    mask = arr.any(axis=2)
    if mask.sum() != 6: return False
    rows=set()
    for j in range(6):
        idx = np.flatnonzero(mask[:,j])
        if idx.size != 1: return False
        i = int(idx[0]); c = arr[i,j]
        if abs(int(c[0])) != den or c[1] or c[2] or c[3]: return False
        rows.add(i)
    return rows == INPUT_MODES

PAIRS = list(combinations(range(10),2))
NODES = 0
SOLS = []

def search(arr, den, depth, path):
    global NODES
    NODES += 1
    mask = arr.any(axis=2)
    n = int(mask.sum())
    if n == 6 and is_goal(arr, den):
        SOLS.append(list(path)); return
    if depth == 0 or n - 6 > depth * 6: return
    moves = []
    for i,j in PAIRS:
        for name in ANGLES:
            for ori in (1,-1):
                new, nden = apply_move(arr, den, i, j, name, ori)
                dn = int(new.any(axis=2).sum()) - n
                if dn < 0:
                    moves.append((dn,i,j,name,ori,new,nden))
    moves.sort(key=lambda t: t[0])
    for dn,i,j,name,ori,new,nden in moves:
        search(new, nden, depth-1, path+[(i,j,name,ori)])

def z4_consistent(path):
    """Reduction path moves (i,j,name,ori), elimination order.
    ori=+1 requires k_j - k_i = 1 mod 4, ori=-1 requires 3 mod 4
    (labels include up-to-2 shift-by-2 events usable before any move).
    Check base consistency without pi first; then with pi shift events.
    We model pi events as: choose up to 2 (mode, position) and add 2 to that
    mode's label for all moves at position >= p.  Equivalent search below."""
    # base: union-find with Z4 offsets
    def check(shifts):
        # shifts: dict mode -> position from which label shifted by 2
        par = {m: (m,0) for m in range(10)}
        def find(x):
            p=0
            while par[x][0]!=x:
                p=(p+par[x][1])%4; x=par[x][0]
            return x,p
        for pos,(i,j,name,ori) in enumerate(path):
            delta = 1 if ori>0 else 3
            si = 2 if (i in shifts and pos >= shifts[i]) else 0
            sj = 2 if (j in shifts and pos >= shifts[j]) else 0
            need = (delta - sj + si) % 4   # k_j - k_i = need
            ri,pi_ = find(i); rj,pj_ = find(j)
            if ri==rj:
                if (pj_-pi_)%4 != need: return False
            else:
                par[rj]=(ri,(need+pi_-pj_)%4)
        return True
    if check({}): return ("no-pi",)
    n = len(path)
    for m1 in range(10):
        for p1 in range(n+1):
            if check({m1:p1}): return ("pi", (m1,p1))
    for m1 in range(10):
        for p1 in range(n+1):
            for m2 in range(m1,10):
                for p2 in range(n+1):
                    if m1==m2 and p1==p2: continue
                    if check({m1:p1, m2:p2}) if m1!=m2 else False:
                        return ("pi2", (m1,p1),(m2,p2))
    return None

arr, den = load_v("out/real10_s0.json")
search(arr, den, 12, [])
print("nodes", NODES, "solutions", len(SOLS), flush=True)
good = []
for p in SOLS:
    r = z4_consistent(p)
    if r:
        good.append((p, r))
print("z4-consistent:", len(good))
for p, r in good[:5]:
    print(r); [print(" ", s) for s in p]
json.dump([[list(map(list, [p])), list(r)] for p,r in good] if good else [],
          open("out/z4_solutions.json","w"), default=str)
