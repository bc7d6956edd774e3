"""Square-system LM solve for the reduced 9-mode GHZ heralding circuit.

Overparameterize a nearest-neighbor mesh until #params ~ #residuals, find an
exact interior solution with batched Levenberg-Marquardt (all in jax), then
greedily prune beam splitters back out while re-solving.
"""

import json
import os
import sys

import numpy as np

import jax

jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
from jax import lax

from reduced_search import M, residual  # fixed problem data (9 modes)

_EVEN = [(i, i + 1) for i in range(0, M - 1, 2)]
_ODD = [(i, i + 1) for i in range(1, M - 1, 2)]


def mesh(depth):
    pairs = []
    for d in range(depth):
        pairs += _EVEN if d % 2 == 0 else _ODD
    return pairs


def lm_batch(pairs, x0_batch, iters=400, seed_lambda=1e-3):
    """Batched Levenberg-Marquardt; returns (final params, final costs)."""
    iidx = jnp.array([p[0] for p in pairs])
    jidx = jnp.array([p[1] for p in pairs])

    def res(x):
        return residual(iidx, jidx, x)

    jac = jax.jacfwd(res)

    def step(state, _):
        x, lam, cost = state
        r = res(x)
        j = jac(x)
        a = j.T @ j
        g = j.T @ r
        delta = jnp.linalg.solve(a + lam * jnp.eye(a.shape[0]), -g)
        x_new = x + delta
        c_new = 0.5 * jnp.sum(res(x_new) ** 2)
        accept = c_new < cost
        x = jnp.where(accept, x_new, x)
        cost2 = jnp.where(accept, c_new, cost)
        lam = jnp.where(accept, jnp.maximum(lam / 3.0, 1e-14), jnp.minimum(lam * 4.0, 1e8))
        return (x, lam, cost2), None

    def run_one(x0):
        c0 = 0.5 * jnp.sum(res(x0) ** 2)
        (x, lam, cost), _ = lax.scan(step, (x0, seed_lambda, c0), None, length=iters)
        return x, cost

    return jax.jit(jax.vmap(run_one))(x0_batch)


def random_starts(rng, n, k):
    return np.concatenate(
        [rng.uniform(0, np.pi / 2, (n, k)), rng.uniform(0, 2 * np.pi, (n, k))], axis=1
    )


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    depth = int(sys.argv[2]) if len(sys.argv) > 2 else 14
    batches = int(sys.argv[3]) if len(sys.argv) > 3 else 3
    batch_size = int(sys.argv[4]) if len(sys.argv) > 4 else 24
    pairs = mesh(depth)
    k = len(pairs)
    print(f"mesh depth {depth}: {k} beam splitters, {2 * k} params", flush=True)
    rng = np.random.default_rng(seed)
    best = (np.inf, None)
    for b in range(batches):
        x0 = jnp.asarray(random_starts(rng, batch_size, k))
        xs, costs = lm_batch(pairs, x0)
        costs = np.asarray(costs)
        i = int(costs.argmin())
        print(f"batch {b}: costs min {costs.min():.3e} median {np.median(costs):.3e}",
              flush=True)
        if costs[i] < best[0]:
            best = (float(costs[i]), np.asarray(xs[i]))
        if best[0] < 1e-24:
            break
    print("best cost:", best[0])
    out = os.path.join(os.path.dirname(__file__), "out", f"square_d{depth}_s{seed}.json")
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w") as fh:
        json.dump({"cost": best[0], "pairs": [list(p) for p in pairs],
                   "params": best[1].tolist()}, fh, indent=2)
    print("wrote", out)


if __name__ == "__main__":
    main()
