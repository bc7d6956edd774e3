"""Exact decomposition of the recovered transfer matrix into allowed Givens.

Entries live in Q(sqrt2, sqrt3): store integer coefficient 4-vectors over the
basis (1, sqrt2, sqrt3, sqrt6) plus one global power-of-6 denominator, so the
Givens updates are integer matmuls.  Iterative-deepening DFS over strictly
nonzero-count-decreasing moves reduces the 10x6 isometry to the input
embedding; rotations have cos^2 in {1/2, 1/4, 2/3}.
"""

import json
import math
import sys
from itertools import combinations

import numpy as np

SQ2, SQ3, SQ6 = math.sqrt(2), math.sqrt(3), math.sqrt(6)


def mulmat(coef):
    """4x4 integer matrix of left-multiplication by coef in the field basis."""
    a, b, c, d = coef
    return np.array(
        [
            [a, 2 * b, 3 * c, 6 * d],
            [b, a, 3 * d, 3 * c],
            [c, 2 * d, a, 2 * b],
            [d, c, b, a],
        ],
        dtype=np.int64,
    )


# (c, s) with denominator 6: 1/2 -> (sqrt2/2, sqrt2/2); 1/4 -> (1/2, sqrt3/2);
# 2/3 -> (sqrt6/3, sqrt3/3)
ANGLES = {
    "1/2": ((0, 3, 0, 0), (0, 3, 0, 0)),
    "1/4": ((3, 0, 0, 0), (0, 0, 3, 0)),
    "2/3": ((0, 0, 0, 2), (0, 0, 2, 0)),
}
MUL = {k: (mulmat(c), mulmat(s)) for k, (c, s) in ANGLES.items()}

INPUT_MODES = frozenset((0, 2, 3, 5, 7, 8))


def from_float(v, tol=1e-6):
    """Recognize v as q*r with q rational (denom up to 12) and r a basis radical."""
    for ri, r in enumerate((1.0, SQ2, SQ3, SQ6)):
        for den in (1, 2, 3, 4, 6, 8, 12):
            num = v / r * den
            if abs(num - round(num)) < tol * den and abs(round(num)) <= 12:
                coef = [0, 0, 0, 0]
                coef[ri] = int(round(num))
                from fractions import Fraction

                return coef, den
    raise ValueError(f"unrecognized value {v}")


def load_v(path):
    hits = json.load(open(path))["hits"]
    m = np.asarray(hits[0]).reshape(10, 6)
    q, r = np.linalg.qr(m)
    vf = q * np.sign(np.diag(r))[None, :]
    # common denominator: lcm of the individual ones
    coefs, dens = zip(*[from_float(x) for x in vf.ravel()])
    den = math.lcm(*dens)
    arr = np.zeros((10, 6, 4), dtype=np.int64)
    for idx, (coef, d) in enumerate(zip(coefs, dens)):
        i, j = divmod(idx, 6)
        arr[i, j] = np.asarray(coef, dtype=np.int64) * (den // d)
    return arr, den


def normalize(arr, den):
    g = int(np.gcd.reduce(np.abs(arr), axis=None))
    if g == 0:
        return arr, 1
    g = math.gcd(g, den)
    if g > 1:
        arr = arr // g
        den //= g
    return arr, den


def apply_move(arr, den, i, j, name, ori):
    mc, ms = MUL[name]
    if ori < 0:
        ms = -ms
    new = arr * 6
    ri, rj = arr[i], arr[j]
    new[i] = ri @ mc.T + rj @ ms.T
    new[j] = rj @ mc.T - ri @ ms.T
    return normalize(new, den * 6)


def nnz_mask(arr):
    return arr.any(axis=2)


def canon_key(arr, den):
    # column signs are free: flip each column so its first nonzero coef is > 0
    a = arr.copy()
    for j in range(6):
        col = a[:, j, :].ravel()
        nz = col[col != 0]
        if nz.size and nz[0] < 0:
            a[:, j, :] = -a[:, j, :]
    cols = sorted(a[:, j, :].tobytes() for j in range(6))
    return (den, b"".join(cols))


def is_goal(arr, den):
    mask = nnz_mask(arr)
    if mask.sum() != 6:
        return False
    rows = set()
    for j in range(6):
        idx = np.flatnonzero(mask[:, j])
        if idx.size != 1:
            return False
        i = int(idx[0])
        coef = arr[i, j]
        if abs(int(coef[0])) != den or coef[1] or coef[2] or coef[3]:
            return False
        rows.add(i)
    return rows == INPUT_MODES


PAIRS = list(combinations(range(10), 2))
NODES = 0


def search(arr, den, depth, path, seen):
    global NODES
    NODES += 1
    if NODES % 200000 == 0:
        print("nodes", NODES, "depth-left", depth, flush=True)
    mask = nnz_mask(arr)
    n = int(mask.sum())
    if n == 6 and is_goal(arr, den):
        return path
    if depth == 0 or n - 6 > depth * 6:
        return None
    key = canon_key(arr, den)
    prev = seen.get(key)
    if prev is not None and prev >= depth:
        return None
    seen[key] = depth
    rn = mask.sum(axis=1)
    moves = []
    for i, j in PAIRS:
        # zeros can only be created in columns where both rows are nonzero
        overlap = int((mask[i] & mask[j]).sum())
        if overlap == 0:
            continue
        for name in ANGLES:
            for ori in (1, -1):
                new, nden = apply_move(arr, den, i, j, name, ori)
                dn = int(nnz_mask(new).sum()) - n
                if dn < 0:
                    moves.append((dn, i, j, name, ori, new, nden))
    moves.sort(key=lambda t: t[0])
    for dn, i, j, name, ori, new, nden in moves:
        res = search(new, nden, depth - 1, path + [(i, j, name, ori)], seen)
        if res is not None:
            return res
    return None


def main():
    arr, den = load_v("out/real10_s0.json")
    print("loaded, nnz", int(nnz_mask(arr).sum()), "den", den, flush=True)
    for maxd in range(10, 13):
        print("trying depth", maxd, flush=True)
        seen = {}
        res = search(arr, den, maxd, [], seen)
        if res is not None:
            print("FOUND at depth", maxd, "- reduction moves (reverse circuit order):")
            for step in res:
                print(step)
            with open("out/decomposition.json", "w") as fh:
                json.dump(res, fh)
            return
        print("exhausted depth", maxd, "nodes", NODES, flush=True)
    print("no decomposition found up to depth 12")


if __name__ == "__main__":
    main()
