"""Seeded admissible fiber polynomials and an independent argmax oracle."""
from __future__ import annotations

import numpy as np

from spsolve.fibering import FiberPolynomial


def random_fiber(rng) -> FiberPolynomial:
    """Exponents from a random admissible (N, q, nu, kbar); coefficients log-uniform."""
    dim = int(rng.choice([3, 4, 5]))
    q = rng.uniform(2.05, 2.95)
    nu = max(dim / 2.0, 2.0 / (q - 1.0)) + rng.uniform(0.1, 3.0)
    lo, hi = (nu * (3.0 - q) - 2.0) / 2.0, (4.0 * nu - dim - 2.0) / 2.0
    # stay off the interval ends, where the argmax leaves double range
    kbar = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo))
    a, b, c, d = np.exp(rng.uniform(np.log(0.1), np.log(10.0), 4))
    e = (2 * nu + 2 - dim, 2 * nu - dim, 4 * nu - dim - 2 - 2 * kbar, nu * (q + 1) - dim)
    return FiberPolynomial(a, b, c, d, e)


def root_bracket(fp: FiberPolynomial) -> tuple[float, float]:
    """A priori interval holding every critical point.

    At a root some positive term of f'(t)/t^{P-1} is at least dP/3, and every
    term is at most dP.
    """
    e = fp.exponents
    top = e[3] * fp.d
    pairs = [(cf * ei, e[3] - ei) for cf, ei in zip((fp.a, fp.b, fp.c), e[:3]) if cf > 0]
    lo = min((k / top) ** (1 / gap) for k, gap in pairs)
    hi = max((3 * k / top) ** (1 / gap) for k, gap in pairs)
    return 0.5 * lo, 2.0 * hi


def dense_argmax(fp: FiberPolynomial, lo: float | None = None, hi: float | None = None, n: int = 10_000):
    """Sign changes of f' on a log grid, then bisection inside the first bracket."""
    if lo is None or hi is None:
        lo, hi = root_bracket(fp)
    t = np.logspace(np.log10(lo), np.log10(hi), n)
    e = fp.exponents
    # f'(t) / t^{P-1}, same sign as f'
    scaled = (
        fp.a * e[0] * t ** (e[0] - e[3])
        + fp.b * e[1] * t ** (e[1] - e[3])
        + fp.c * e[2] * t ** (e[2] - e[3])
        - fp.d * e[3]
    )
    s = np.sign(scaled)
    changes = np.nonzero(s[1:] != s[:-1])[0]
    if changes.size == 0:
        return 0, None
    x0, x1 = t[changes[0]], t[changes[0] + 1]
    f0 = np.sign(fp.derivative(x0))
    for _ in range(200):
        mid = 0.5 * (x0 + x1)
        if np.sign(fp.derivative(mid)) == f0:
            x0 = mid
        else:
            x1 = mid
    return int(changes.size), 0.5 * (x0 + x1)
