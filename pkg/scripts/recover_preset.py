"""Recover the 10-mode GHZ-heralding circuit by numerical optimization.

Offline tool (not part of the library API): searches beam-splitter meshes for
a circuit that, fed with |1011010110>, heralds (|000>+|111>)/sqrt(2) on the
dual-rail pairs (1,2),(3,4),(5,6) with probability 1/108 for each of the
heralds (1,1,1,0) and (1,1,0,1) on modes 7-10. The found circuit is then
pruned (beam splitters driven to identity) and snapped to the discrete
transmissions {1/2, 1/4, 2/3} and phases {0, pi/2, pi, 3pi/2}.

Writes candidates to scripts/out/.
"""

import itertools
import json
import math
import os
import sys

import numpy as np
import scipy.optimize

import jax

jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp

# ---- fixed problem data (0-based modes) ----
N_MODES = 10
IN_COLS = (0, 2, 3, 5, 7, 8)          # |1011010110>
HERALDS = ((6, 7, 8), (6, 7, 9))      # patterns (1,1,1,0) and (1,1,0,1) on 7..10
P_TARGET = 1.0 / 108.0


def signal_patterns():
    """3-photon occupations over modes 0..5, descending lex (matches package)."""
    pats = sorted(
        (p for p in itertools.product(range(4), repeat=6) if sum(p) == 3),
        reverse=True,
    )
    return np.array(pats, dtype=np.int64)


SIG = signal_patterns()
SIG_ROWS = np.array([[m for m in range(6) for _ in range(row[m])] for row in SIG])
SIG_FACT = np.array([np.prod([math.factorial(c) for c in row]) for row in SIG])
I000 = int(np.where((SIG == (1, 0, 1, 0, 1, 0)).all(axis=1))[0][0])
I111 = int(np.where((SIG == (0, 1, 0, 1, 0, 1)).all(axis=1))[0][0])

# Ryser masks for 6x6 permanents
_ks = np.arange(1, 1 << 6, dtype=np.uint32)
MASKS = ((_ks[:, None] >> np.arange(6, dtype=np.uint32)[None, :]) & 1).astype(float)
SIGNS = np.where(MASKS.sum(axis=1) % 2 == 0, 1.0, -1.0)  # n=6 even: (-1)^n = +1

ROW_IDX = [
    np.concatenate([SIG_ROWS, np.tile(h, (len(SIG), 1))], axis=1) for h in HERALDS
]


def build_unitary(pairs, alphas, deltas):
    u = jnp.eye(N_MODES, dtype=jnp.complex128)
    for (i, j), a, d in zip(pairs, alphas, deltas):
        t = jnp.cos(a)
        r = 1j * jnp.sin(a)
        b = jnp.eye(N_MODES, dtype=jnp.complex128)
        b = b.at[i, i].set(t).at[j, j].set(t).at[i, j].set(r).at[j, i].set(r)
        p = jnp.eye(N_MODES, dtype=jnp.complex128).at[j, j].set(jnp.exp(1j * d))
        u = b @ (p @ u)
    return u


def herald_amplitudes(u):
    """Per herald pattern: 56 amplitudes over the signal occupations."""
    out = []
    for rows in ROW_IDX:
        subs = u[rows][:, :, IN_COLS]                      # (56, 6, 6)
        sums = jnp.einsum("bnm,sm->bns", subs, jnp.asarray(MASKS))
        perms = jnp.prod(sums, axis=1) @ jnp.asarray(SIGNS)
        out.append(perms / jnp.sqrt(jnp.asarray(SIG_FACT)))
    return out


def loss_fn(pairs, params, junk_weight=1.0):
    k = len(pairs)
    alphas, deltas = params[:k], params[k:]
    u = build_unitary(pairs, alphas, deltas)
    amps = herald_amplitudes(u)
    half = P_TARGET / 2.0
    s = jnp.sqrt(half)
    eps = 1e-18
    loss = 0.0
    for a in amps:
        p = jnp.sum(jnp.abs(a) ** 2)
        m0 = jnp.sqrt(jnp.abs(a[I000]) ** 2 + eps)
        m1 = jnp.sqrt(jnp.abs(a[I111]) ** 2 + eps)
        junk = p - m0**2 - m1**2
        loss = (
            loss
            + ((m0 - s) / s) ** 2
            + ((m1 - s) / s) ** 2
            + junk_weight * (junk / half) ** 2
        )
    return loss


_FG_CACHE = {}


def _fg(pairs, junk_weight):
    key = (tuple(map(tuple, pairs)), float(junk_weight))
    if key not in _FG_CACHE:
        _FG_CACHE[key] = jax.jit(
            jax.value_and_grad(lambda p: loss_fn(pairs, p, junk_weight))
        )
    return _FG_CACHE[key]


def make_objective(pairs, free_mask=None, fixed=None, junk_weight=1.0):
    fg = _fg(pairs, junk_weight)
    if free_mask is None:
        def f(x):
            v, g = fg(jnp.asarray(x))
            return float(v), np.asarray(g)
        return f
    free_idx = np.where(free_mask)[0]

    def f(x):
        full = fixed.copy()
        full[free_idx] = x
        v, g = fg(jnp.asarray(full))
        return float(v), np.asarray(g)[free_idx]
    return f


def minimize(pairs, x0, free_mask=None, fixed=None, maxiter=3000, junk_weight=1.0):
    f = make_objective(pairs, free_mask, fixed, junk_weight)
    res = scipy.optimize.minimize(
        f, x0, jac=True, method="L-BFGS-B",
        options={"maxiter": maxiter, "ftol": 1e-18, "gtol": 1e-14},
    )
    return res


JUNK_SCHEDULE = (0.0, 0.01, 0.1, 1.0, 10.0, 1.0)


def annealed(pairs, x0, maxiter=1500):
    x = np.asarray(x0, dtype=float)
    res = None
    for w in JUNK_SCHEDULE:
        res = minimize(pairs, x, maxiter=maxiter, junk_weight=w)
        x = res.x
    return res


def refine(pairs, params, free_mask=None, rounds=3, junk_weight=1.0):
    """Polish to machine precision with restarted L-BFGS."""
    params = np.asarray(params, dtype=float)
    if free_mask is None:
        free_mask = np.ones(len(params), dtype=bool)
    for _ in range(rounds):
        res = minimize(
            pairs, params[free_mask], free_mask, params.copy(), junk_weight=junk_weight
        )
        params = params.copy()
        params[np.where(free_mask)[0]] = res.x
        if res.fun < 1e-26:
            break
    return params, res.fun


def random_search(pairs, n_starts, seed, maxiter=1500):
    rng = np.random.default_rng(seed)
    k = len(pairs)
    best = []
    for s in range(n_starts):
        x0 = np.concatenate([
            rng.uniform(0, np.pi / 2, k),      # alphas
            rng.uniform(0, 2 * np.pi, k),      # deltas
        ])
        res = annealed(pairs, x0, maxiter=maxiter)
        best.append((res.fun, res.x))
        best.sort(key=lambda t: t[0])
        best = best[:10]
        if s % 5 == 0:
            print(f"  start {s}: best loss {best[0][0]:.3e}", flush=True)
    return best


def describe(pairs, params):
    k = len(pairs)
    alphas, deltas = params[:k], params[k:]
    out = []
    for (i, j), a, d in zip(pairs, alphas, deltas):
        out.append({
            "pair": [i + 1, j + 1],
            "T": float(np.cos(a) ** 2),
            "delta": float(d % (2 * np.pi)),
        })
    return out


def report(pairs, params):
    fg = jax.jit(lambda p: loss_fn(pairs, p))
    amps = herald_amplitudes(build_unitary(pairs, params[:len(pairs)], params[len(pairs):]))
    for h, a in zip(HERALDS, amps):
        a = np.asarray(a)
        p = float(np.sum(np.abs(a) ** 2))
        ghz = (abs(a[I000]) + abs(a[I111])) ** 2 / 2
        print(f"  herald {h}: p={p:.12f} (target {P_TARGET:.12f}) "
              f"F_corr={ghz/p if p else 0:.12f}")
    print(f"  loss={float(fg(jnp.asarray(params))):.3e}")


def residual_fn(pairs, params):
    """Residual vector whose exact zero is the target circuit."""
    k = len(pairs)
    u = build_unitary(pairs, params[:k], params[k:])
    amps = herald_amplitudes(u)
    s = jnp.sqrt(P_TARGET / 2.0)
    res = []
    keep = np.array([i for i in range(len(SIG)) if i not in (I000, I111)])
    for a in amps:
        junk = a[keep]
        res.append(jnp.real(junk))
        res.append(jnp.imag(junk))
        res.append(jnp.abs(a[I000])[None] - s)
        res.append(jnp.abs(a[I111])[None] - s)
    return jnp.concatenate(res)


_LSQ_CACHE = {}


def _lsq_funcs(pairs):
    key = tuple(map(tuple, pairs))
    if key not in _LSQ_CACHE:
        f = jax.jit(lambda p: residual_fn(pairs, p))
        j = jax.jit(jax.jacfwd(lambda p: residual_fn(pairs, p)))
        _LSQ_CACHE[key] = (
            lambda x: np.asarray(f(jnp.asarray(x))),
            lambda x: np.asarray(j(jnp.asarray(x))),
        )
    return _LSQ_CACHE[key]


def solve_lm(pairs, x0, max_nfev=400):
    f, j = _lsq_funcs(pairs)
    return scipy.optimize.least_squares(
        f, x0, jac=j, method="trf", xtol=3e-16, ftol=3e-16, gtol=3e-16,
        max_nfev=max_nfev,
    )


def lm_search(pairs, n_starts, seed, prestage=True):
    rng = np.random.default_rng(seed)
    k = len(pairs)
    best = []
    for s in range(n_starts):
        x0 = np.concatenate([
            rng.uniform(0, np.pi / 2, k),
            rng.uniform(0, 2 * np.pi, k),
        ])
        if prestage:  # put both GHZ amplitudes on target first
            x0 = minimize(pairs, x0, maxiter=2000, junk_weight=0.0).x
        res = solve_lm(pairs, x0)
        cost = float(res.cost)
        best.append((cost, res.x))
        best.sort(key=lambda t: t[0])
        best = best[:10]
        print(f"  lm start {s}: cost {cost:.3e} (best {best[0][0]:.3e})", flush=True)
        if best[0][0] < 1e-25:
            break
    return best


_EVEN = [(i, i + 1) for i in range(0, 9, 2)]
_ODD = [(i, i + 1) for i in range(1, 9, 2)]
MESH5 = _EVEN + _ODD + _EVEN + _ODD + _EVEN
MESH7 = _ODD + _EVEN + _ODD + _EVEN + _ODD + _EVEN + _ODD
MESH9 = _EVEN + _ODD + _EVEN + _ODD + _EVEN + _ODD + _EVEN + _ODD + _EVEN


def main():
    os.makedirs(os.path.join(os.path.dirname(__file__), "out"), exist_ok=True)
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    n_starts = int(sys.argv[2]) if len(sys.argv) > 2 else 60
    pairs = MESH5
    print(f"mesh of {len(pairs)} beam splitters, {n_starts} starts, seed {seed}")
    best = random_search(pairs, n_starts, seed)
    results = []
    for rank, (fun, x) in enumerate(best):
        params, fun = refine(pairs, x)
        print(f"candidate {rank}: refined loss {fun:.3e}")
        report(pairs, params)
        results.append({
            "loss": float(fun),
            "elements": describe(pairs, params),
            "params": params.tolist(),
        })
    out = os.path.join(os.path.dirname(__file__), "out", f"mesh5_seed{seed}.json")
    with open(out, "w") as fh:
        json.dump({"pairs": [list(p) for p in pairs], "results": results}, fh, indent=2)
    print("wrote", out)


if __name__ == "__main__":
    main()
