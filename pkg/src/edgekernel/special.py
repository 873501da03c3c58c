"""Bessel functions of real order, the hard-edge Bessel kernel and the sine kernel.

J_alpha is summed from its power series.  The alternating series loses
roughly ``sqrt(u) / ln 10`` digits to cancellation, so the sum itself runs in
``decimal`` arithmetic with ample guard digits; only the prefactor
``(z/2)^alpha / Gamma(alpha+1)`` is formed in binary64 (via ``log_gamma``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

__all__ = [
    "BesselEvalConfig",
    "DEFAULT_BESSEL",
    "log_gamma",
    "bessel_j",
    "bessel_j_prime",
    "bessel_kernel",
    "bessel_kernel_offdiagonal",
    "bessel_kernel_diagonal_series",
    "sine_kernel",
]

Z_MAX = 30.0


@dataclass(frozen=True)
class BesselEvalConfig:
    series_tolerance: float = 1e-15
    max_terms: int = 200
    diagonal_threshold: float = 1e-4


DEFAULT_BESSEL = BesselEvalConfig()

# Lanczos coefficients, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_log_gamma(x: float) -> float:
    # valid for x >= 0.5
    z = x - 1.0
    series = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        series += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(series)


def log_gamma(x: float) -> tuple[float, int]:
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))``.

    Lanczos approximation for ``x >= 0.5``; reflection below that.
    Small positive integers are served exactly from factorials.
    """
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise ValueError(f"Gamma has a pole at {x}")
    if x == math.floor(x) and x <= 30:
        return math.log(math.factorial(int(x) - 1)), 1
    if x >= 0.5:
        return _lanczos_log_gamma(x), 1
    # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    s = math.sin(math.pi * (x - 2.0 * math.floor(x / 2.0)))
    lg, _ = log_gamma(1.0 - x)
    return math.log(math.pi / abs(s)) - lg, 1 if s > 0 else -1


def _series_terms(alpha: float, q: Decimal, cfg: BesselEvalConfig) -> list[Decimal]:
    """Terms ``(-q)^k / (k! (alpha+1)_k)`` until they fall below tolerance."""
    a = Decimal(alpha)
    tol = Decimal(cfg.series_tolerance)
    term = Decimal(1)
    terms = [term]
    total = term
    peak = abs(term)
    for k in range(1, cfg.max_terms):
        term = -term * q / (k * (a + k))
        terms.append(term)
        total += term
        mag = abs(term)
        peak = max(peak, mag)
        # beyond k(k + alpha) > q the terms decay monotonically
        if k * (a + k) > q and (mag <= tol * abs(total) * Decimal("1e-3") or mag <= peak * Decimal("1e-60")):
            return terms
    raise ArithmeticError("Bessel series did not converge within max_terms")


def _prefactor(alpha: float, half_z: float) -> float:
    """``half_z^alpha / Gamma(alpha + 1)`` for alpha + 1 not a pole."""
    lg, sign = log_gamma(alpha + 1.0)
    if half_z == 0.0:
        if alpha > 0:
            return 0.0
        if alpha == 0:
            return 1.0
        raise ValueError("J_alpha(0) is infinite for negative non-integer alpha")
    return sign * math.exp(alpha * math.log(half_z) - lg)


def bessel_j(alpha: float, z: float, cfg: BesselEvalConfig = DEFAULT_BESSEL) -> float:
    """Bessel function of the first kind ``J_alpha(z)`` for ``alpha > -2``, ``0 <= z <= 30``."""
    alpha = float(alpha)
    z = float(z)
    if not alpha > -2.0:
        raise ValueError("bessel_j requires alpha > -2")
    if not 0.0 <= z <= Z_MAX:
        raise ValueError(f"bessel_j supports 0 <= z <= {Z_MAX}")
    if alpha == -1.0:
        return -bessel_j(1.0, z, cfg)
    with localcontext() as ctx:
        ctx.prec = 60
        q = Decimal(z) * Decimal(z) / 4
        s = sum(_series_terms(alpha, q, cfg), Decimal(0))
        return _prefactor(alpha, z / 2.0) * float(s)


def bessel_j_prime(alpha: float, z: float, cfg: BesselEvalConfig = DEFAULT_BESSEL) -> float:
    """Derivative ``J'_alpha(z) = (J_{alpha-1}(z) - J_{alpha+1}(z)) / 2`` for ``z > 0``."""
    if not alpha > -1.0:
        raise ValueError("bessel_j_prime requires alpha > -1")
    if not z > 0:
        raise ValueError("bessel_j_prime requires z > 0")
    return 0.5 * (bessel_j(alpha - 1.0, z, cfg) - bessel_j(alpha + 1.0, z, cfg))


def bessel_kernel_offdiagonal(alpha: float, u: float, v: float, cfg: BesselEvalConfig = DEFAULT_BESSEL) -> float:
    """Direct quotient form of the Bessel kernel.  Requires ``u != v`` and ``u, v > 0``."""
    su, sv = math.sqrt(u), math.sqrt(v)
    ju, jv = bessel_j(alpha, su, cfg), bessel_j(alpha, sv, cfg)
    dju, djv = bessel_j_prime(alpha, su, cfg), bessel_j_prime(alpha, sv, cfg)
    return (ju * sv * djv - jv * su * dju) / (2.0 * (u - v))


def bessel_kernel_diagonal_series(alpha: float, u: float, v: float, cfg: BesselEvalConfig = DEFAULT_BESSEL) -> float:
    """Bessel kernel from the double power series, valid on and off the diagonal.

    Integrating ``J_alpha(sqrt(s u)) J_alpha(sqrt(s v))`` over ``s`` in [0, 1]
    term by term gives::

        (1/4) (uv)^(alpha/2) / (4^alpha Gamma(alpha+1)^2)
              * sum_{j,k} c_j(u) c_k(v) / (j + k + alpha + 1)

    with ``c_j(u) = (-u/4)^j / (j! (alpha+1)_j)``.  No division by ``u - v``.
    """
    if u == 0.0 or v == 0.0:
        if alpha > 0:
            return 0.0
        if alpha < 0:
            raise ValueError("Bessel kernel undefined at 0 for alpha < 0")
    with localcontext() as ctx:
        ctx.prec = 90
        fine = BesselEvalConfig(series_tolerance=cfg.series_tolerance * 1e-20, max_terms=cfg.max_terms)
        cu = _series_terms(alpha, Decimal(u) / 4, fine)
        cv = _series_terms(alpha, Decimal(v) / 4, fine)
        a1 = Decimal(alpha) + 1
        total = Decimal(0)
        for j, x in enumerate(cu):
            inner = Decimal(0)
            for k, y in enumerate(cv):
                inner += y / (a1 + j + k)
            total += x * inner
        s = float(total)
    lg, _ = log_gamma(alpha + 1.0)
    if alpha == 0.0:
        pref = 0.25
    else:
        pref = 0.25 * math.exp(0.5 * alpha * (math.log(u) + math.log(v)) - alpha * math.log(4.0) - 2.0 * lg)
    return pref * s


def bessel_kernel(alpha: float, u: float, v: float, cfg: BesselEvalConfig = DEFAULT_BESSEL) -> float:
    """Hard-edge Bessel kernel of order ``alpha > -1``.

    Uses the quotient form when ``|u - v| > diagonal_threshold * max(1, u)``
    and the double power series otherwise (including ``u == v``).
    """
    alpha, u, v = float(alpha), float(u), float(v)
    if not alpha > -1.0:
        raise ValueError("bessel_kernel requires alpha > -1")
    if u < 0 or v < 0:
        raise ValueError("bessel_kernel requires u, v >= 0")
    if alpha < 0 and (u == 0 or v == 0):
        raise ValueError("bessel_kernel requires u, v > 0 for alpha < 0")
    if max(u, v) > Z_MAX**2:
        raise ValueError(f"bessel_kernel supports u, v <= {Z_MAX**2:g}")
    far = abs(u - v) > cfg.diagonal_threshold * max(1.0, u)
    if far and u > 0 and v > 0:
        return bessel_kernel_offdiagonal(alpha, u, v, cfg)
    return bessel_kernel_diagonal_series(alpha, u, v, cfg)


def _sinpi(t: float) -> float:
    r = math.fmod(t, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def sine_kernel(a: float, b: float) -> float:
    """``sin(pi (a-b)) / (pi (a-b))``, equal to 1 at ``a == b``."""
    d = float(a) - float(b)
    if d == 0.0:
        return 1.0
    return _sinpi(d) / (math.pi * d)
