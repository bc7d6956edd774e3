"""Real-orthogonal 10-mode isometry search.

A circuit of beam splitters and 0/pi phase shifters is gauge-equivalent (up
to input/output phases, which junk-zeroing and branch magnitudes ignore) to
a real orthogonal transfer matrix, so search over real 10x6 isometries.
"""

import json
import os
import sys

import numpy as np

import jax

jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
from jax import lax

from full10_search import ROWS1, ROWS2, MASKS, SIGNS, FACT, I000, I111, KEEP, _S

NPAR = 60


def amps(v, rows):
    subs = v[rows]
    sums = jnp.einsum("bnm,sm->bns", subs, MASKS)
    return (jnp.prod(sums, axis=1) @ SIGNS) / FACT


def residual(x):
    m = x.reshape(10, 6)
    q, r = jnp.linalg.qr(m)
    q = q * jnp.sign(jnp.diagonal(r))[None, :]
    out = []
    for rows in (ROWS1, ROWS2):
        a = amps(q, rows)
        out += [a[KEEP], jnp.abs(a[I000])[None] - _S, jnp.abs(a[I111])[None] - _S]
    return jnp.concatenate(out)


_jac = jax.jacfwd(residual)


def lm_run(x0, iters=700):
    def step(state, _):
        x, lam, cost = state
        r = residual(x)
        j = _jac(x)
        delta = jnp.linalg.solve(j.T @ j + lam * jnp.eye(NPAR), -(j.T @ r))
        xn = x + delta
        cn = 0.5 * jnp.sum(residual(xn) ** 2)
        acc = cn < cost
        return (jnp.where(acc, xn, x),
                jnp.where(acc, jnp.maximum(lam / 3.0, 1e-14),
                          jnp.minimum(lam * 4.0, 1e9)),
                jnp.where(acc, cn, cost)), None

    c0 = 0.5 * jnp.sum(residual(x0) ** 2)
    (x, lam, cost), _ = lax.scan(step, (x0, 1e-2, c0), None, length=iters)
    return x, cost


lm_batch = jax.jit(jax.vmap(lm_run))


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    batches = int(sys.argv[2]) if len(sys.argv) > 2 else 6
    batch_size = int(sys.argv[3]) if len(sys.argv) > 3 else 24
    rng = np.random.default_rng(seed)
    best = (np.inf, None)
    hits = []
    for b in range(batches):
        x0 = jnp.asarray(rng.normal(size=(batch_size, NPAR)))
        xs, costs = lm_batch(x0)
        costs = np.asarray(costs)
        print(f"batch {b}: min {costs.min():.3e} median {np.median(costs):.3e} "
              f"hits {(costs < 1e-22).sum()}", flush=True)
        for i in range(batch_size):
            if costs[i] < 1e-22:
                hits.append(np.asarray(xs[i]).tolist())
        i = int(costs.argmin())
        if costs[i] < best[0]:
            best = (float(costs[i]), np.asarray(xs[i]))
    print("best cost:", best[0], "nhits", len(hits))
    out = os.path.join(os.path.dirname(__file__), "out", f"real10_s{seed}.json")
    with open(out, "w") as fh:
        json.dump({"cost": best[0], "x": best[1].tolist(), "hits": hits}, fh)
    print("wrote", out)


if __name__ == "__main__":
    main()
