"""Map feasibility of (junk = 0, |a000| = |a111| = m) vs branch amplitude m.

For each m on a grid, run multi-start LM and record the best residual cost.
Exactly-zero cost at some m gives a seed for continuation in m toward the
target amplitude sqrt(1/108).
"""

import sys

import numpy as np

import jax

jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp
from jax import lax

import isometry_search as iso
import symmetric_search as sym
from reduced_search import I000, I111, KEEP


def residual_full(x, m):
    q = _qr(x)
    a = iso.amps(q)
    junk = a[KEEP]
    return jnp.concatenate(
        [jnp.real(junk), jnp.imag(junk),
         jnp.abs(a[I000])[None] - m, jnp.abs(a[I111])[None] - m]
    )


def _qr(x):
    mtx = (x[:54] + 1j * x[54:]).reshape(9, 6)
    q, r = jnp.linalg.qr(mtx)
    return q * jnp.exp(-1j * jnp.angle(jnp.diagonal(r)))[None, :]


def residual_sym(x, m):
    a = sym.amps(sym.build_u(x))
    junk = a[sym.JUNK_REPS]
    return jnp.concatenate(
        [jnp.real(junk), jnp.imag(junk), jnp.abs(a[I000])[None] - m]
    )


def make_lm(res_fn, npar):
    jac = jax.jacfwd(res_fn)

    def lm_run(x0, m, iters=800):
        def step(state, _):
            x, lam, cost = state
            r = res_fn(x, m)
            j = jac(x, m)
            g = j.T @ r
            delta = jnp.linalg.solve(j.T @ j + lam * jnp.eye(npar), -g)
            x_new = x + delta
            c_new = 0.5 * jnp.sum(res_fn(x_new, m) ** 2)
            accept = c_new < cost
            x = jnp.where(accept, x_new, x)
            cost2 = jnp.where(accept, c_new, cost)
            lam = jnp.where(accept, jnp.maximum(lam / 3.0, 1e-14),
                            jnp.minimum(lam * 4.0, 1e9))
            return (x, lam, cost2), None

        c0 = 0.5 * jnp.sum(res_fn(x0, m) ** 2)
        (x, lam, cost), _ = lax.scan(step, (x0, 1e-2, c0), None, length=iters)
        return x, cost

    return jax.jit(jax.vmap(lm_run, in_axes=(0, None)))


def main():
    which = sys.argv[1] if len(sys.argv) > 1 else "sym"
    nstart = int(sys.argv[2]) if len(sys.argv) > 2 else 8
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else 0
    if which == "sym":
        lm = make_lm(residual_sym, sym.NPAR)
        npar = sym.NPAR
    else:
        lm = make_lm(residual_full, 108)
        npar = 108
    rng = np.random.default_rng(seed)
    s = np.sqrt(1.0 / 108.0)
    for m in [0.01, 0.02, 0.04, 0.06, 0.0821, 0.09, s, 0.10]:
        x0 = jnp.asarray(rng.normal(size=(nstart, npar)))
        xs, costs = lm(x0, m)
        costs = np.asarray(costs)
        print(f"m={m:.4f}: min {costs.min():.3e} median {np.median(costs):.3e}",
              flush=True)


if __name__ == "__main__":
    main()
