"""Random-topology search for the reduced 9-mode GHZ heralding circuit.

Reduced problem: inputs |101101011> on 9 modes, herald = one photon in each
of modes 7, 8, 9 (0-based 6, 7, 8), heralded state = (|000>+|111>)/sqrt(2)
on dual-rail pairs (1,2),(3,4),(5,6), herald probability 1/54. A final 50:50
splitter on (9,10) then reproduces the two 10-mode patterns at 1/108 each.

Topology (the ordered list of beam-splitter mode pairs) is sampled randomly;
parameters are solved by Levenberg-Marquardt on the full residual system.
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

M = 9
IN_COLS = (0, 2, 3, 5, 7, 8)
HERALD = (6, 7, 8)
P_TARGET = 1.0 / 54.0

SIG = np.array(
    sorted((p for p in itertools.product(range(4), repeat=6) if sum(p) == 3), reverse=True),
    dtype=np.int64,
)
SIG_ROWS = np.array([[m for m in range(6) for _ in range(row[m])] for row in SIG])
SIG_FACT = np.array([np.prod([math.factorial(c) for c in row]) for row in SIG])
I000 = int(np.where((SIG == (1, 0, 1, 0, 1, 0)).all(axis=1))[0][0])
I111 = int(np.where((SIG == (0, 1, 0, 1, 0, 1)).all(axis=1))[0][0])
KEEP = np.array([i for i in range(len(SIG)) if i not in (I000, I111)])

_ks = np.arange(1, 1 << 6, dtype=np.uint32)
MASKS = ((_ks[:, None] >> np.arange(6, dtype=np.uint32)[None, :]) & 1).astype(float)
SIGNS = np.where(MASKS.sum(axis=1) % 2 == 0, 1.0, -1.0)
ROWS = np.concatenate([SIG_ROWS, np.tile(HERALD, (len(SIG), 1))], axis=1)


def build_unitary(iidx, jidx, alphas, deltas):
    """Mode unitary from dynamic (i, j) beam-splitter indices."""
    u = jnp.eye(M, dtype=jnp.complex128)
    for i, j, a, d in zip(iidx, jidx, alphas, deltas):
        ei = jax.nn.one_hot(i, M, dtype=jnp.complex128)
        ej = jax.nn.one_hot(j, M, dtype=jnp.complex128)
        t = jnp.cos(a)
        r = 1j * jnp.sin(a)
        b = (
            jnp.eye(M, dtype=jnp.complex128)
            + (t - 1.0) * (jnp.outer(ei, ei) + jnp.outer(ej, ej))
            + r * (jnp.outer(ei, ej) + jnp.outer(ej, ei))
        )
        p = jnp.eye(M, dtype=jnp.complex128) + (jnp.exp(1j * d) - 1.0) * jnp.outer(ej, ej)
        u = b @ (p @ u)
    return u


def herald_amps(u):
    subs = u[ROWS][:, :, IN_COLS]
    sums = jnp.einsum("bnm,sm->bns", subs, jnp.asarray(MASKS))
    perms = jnp.prod(sums, axis=1) @ jnp.asarray(SIGNS)
    return perms / jnp.sqrt(jnp.asarray(SIG_FACT))


def residual(iidx, jidx, params):
    k = len(iidx)
    u = build_unitary(iidx, jidx, params[:k], params[k:])
    a = herald_amps(u)
    s = jnp.sqrt(P_TARGET / 2.0)
    junk = a[KEEP]
    return jnp.concatenate([
        jnp.real(junk),
        jnp.imag(junk),
        jnp.abs(a[I000])[None] - s,
        jnp.abs(a[I111])[None] - s,
    ])


_CACHE = {}


def lsq_funcs(n_bs):
    if n_bs not in _CACHE:
        def res_p(params, iidx, jidx):
            return residual(iidx, jidx, params)
        f = jax.jit(res_p)
        jac = jax.jit(jax.jacfwd(res_p, argnums=0))
        _CACHE[n_bs] = (f, jac)
    return _CACHE[n_bs]


def solve(pairs, x0, max_nfev=250):
    n = len(pairs)
    f, jac = lsq_funcs(n)
    iidx = jnp.array([p[0] for p in pairs])
    jidx = jnp.array([p[1] for p in pairs])
    return scipy.optimize.least_squares(
        lambda x: np.asarray(f(jnp.asarray(x), iidx, jidx)),
        x0,
        jac=lambda x: np.asarray(jac(jnp.asarray(x), iidx, jidx)),
        method="trf", xtol=3e-16, ftol=3e-16, gtol=3e-16, max_nfev=max_nfev,
    )


ALL_PAIRS = [(i, j) for i in range(M) for j in range(i + 1, M)]


def sample_topology(rng, n_bs):
    """Random ordered pair list; keep every mode touched and heralds reachable."""
    while True:
        idx = rng.integers(0, len(ALL_PAIRS), size=n_bs)
        pairs = [ALL_PAIRS[i] for i in idx]
        touched = set(m for p in pairs for m in p)
        if touched == set(range(M)):
            return pairs


def search(seed, n_topologies, n_bs=11, starts_per_topology=2, report_every=25):
    rng = np.random.default_rng(seed)
    best = []
    for t in range(n_topologies):
        pairs = sample_topology(rng, n_bs)
        for _ in range(starts_per_topology):
            x0 = np.concatenate([
                rng.uniform(0, np.pi / 2, n_bs),
                rng.uniform(0, 2 * np.pi, n_bs),
            ])
            res = solve(pairs, x0)
            cost = float(res.cost)
            best.append((cost, pairs, res.x.tolist()))
            best.sort(key=lambda r: r[0])
            best = best[:20]
            if cost < 1e-22:
                return best, True
        if t % report_every == 0:
            print(f"topology {t}: best cost {best[0][0]:.3e}", flush=True)
    return best, False


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    n_top = int(sys.argv[2]) if len(sys.argv) > 2 else 200
    n_bs = int(sys.argv[3]) if len(sys.argv) > 3 else 11
    best, found = search(seed, n_top, n_bs)
    print("FOUND" if found else "not found", "best:", [f"{c:.2e}" for c, _, _ in best[:8]])
    out = os.path.join(os.path.dirname(__file__), "out", f"reduced_seed{seed}_bs{n_bs}.json")
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w") as fh:
        json.dump(
            [{"cost": c, "pairs": [list(p) for p in ps], "params": x} for c, ps, x in best],
            fh, indent=2,
        )
    print("wrote", out)


if __name__ == "__main__":
    main()
