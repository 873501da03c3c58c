"""Independent reference computations used only by the tests.

None of these routes share code with the package: exact rational Gram-Schmidt,
high-precision moment sums, bisection and Richardson extrapolation.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath


def legendre_monomial_moment(k: int) -> Fraction:
    """Exact ``int_{-1}^{1} x^k dx``."""
    return Fraction(0) if k % 2 else Fraction(2, k + 1)


def gram_schmidt_legendre(n_max: int) -> tuple[list[float], list[float]]:
    """Orthonormal recurrence coefficients from exact monomial moments.

    Monic orthogonal polynomials are built as rational coefficient lists;
    ``a_n^2 = ||pi_n||^2 / ||pi_{n-1}||^2`` and ``b_n = <x pi_n, pi_n> / ||pi_n||^2``.
    """

    def inner(p, q):
        return sum(
            (ci * cj * legendre_monomial_moment(i + j) for i, ci in enumerate(p) for j, cj in enumerate(q)),
            Fraction(0),
        )

    monic = [[Fraction(1)]]
    for n in range(1, n_max + 1):
        xn = [Fraction(0)] * n + [Fraction(1)]
        p = list(xn)
        for q in monic:
            c = inner(xn, q) / inner(q, q)
            for i, qi in enumerate(q):
                p[i] -= c * qi
        monic.append(p)
    norms = [inner(p, p) for p in monic]
    a = [math.sqrt(norms[n] / norms[n - 1]) for n in range(1, n_max + 1)]
    b = []
    for n in range(n_max):
        xp = [Fraction(0)] + monic[n]
        b.append(float(inner(xp, monic[n]) / norms[n]))
    return a, b


def jacobi_moment(k: int, alpha: float, beta: float, dps: int = 60) -> float:
    """``int x^k (1-x)^alpha (1+x)^beta dx`` via ``x = 1 - (1-x)`` and Beta integrals."""
    with mpmath.workdps(dps):
        a, b = mpmath.mpf(alpha), mpmath.mpf(beta)
        total = mpmath.mpf(0)
        for j in range(k + 1):
            total += (
                mpmath.binomial(k, j)
                * (-1) ** j
                * mpmath.power(2, a + b + j + 1)
                * mpmath.beta(a + j + 1, b + 1)
            )
        return float(total)


def bisect_root(f, lo: float, hi: float, tol: float = 1e-14) -> float:
    flo = f(lo)
    if flo * f(hi) > 0:
        raise ValueError("no sign change")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def richardson_diagonal(offdiag, u: float, steps=(1e-2, 1e-3, 1e-4)) -> float:
    """Limit of ``offdiag(u, u + h)`` as ``h -> 0``, Richardson-extrapolated in ``h``.

    Assumes the step sequence has a constant ratio and the error is a power series in ``h``.
    """
    values = [offdiag(u, u + h) for h in steps]
    r = steps[0] / steps[1]
    order = 1
    while len(values) > 1:
        f = r**order
        values = [(f * values[i + 1] - values[i]) / (f - 1.0) for i in range(len(values) - 1)]
        order += 1
    return values[0]


def half_integer_bessel_kernel(u: float, v: float) -> float:
    """Bessel kernel of order 1/2 with ``J_{1/2}(z) = sqrt(2/(pi z)) sin z`` substituted."""
    s, t = math.sqrt(u), math.sqrt(v)
    num = math.sin(s) * t * math.cos(t) - s * math.cos(s) * math.sin(t)
    return num / (math.pi * math.sqrt(s * t) * (u - v))


def gauss_legendre_reference(n: int):
    """numpy's Gauss-Legendre rule, an external route for comparisons."""
    import numpy as np

    return np.polynomial.legendre.leggauss(n)
