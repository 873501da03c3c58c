"""Recurrence coefficients and Gauss rules for generalized Jacobi measures.

Orthonormal polynomials satisfy

    x p_n(x) = a_{n+1} p_{n+1}(x) + b_n p_n(x) + a_n p_{n-1}(x),   p_{-1} = 0,

with ``p_0 = mass^{-1/2}``.  Coefficients come either from the classical
closed form (pure Jacobi weight) or from a discrete Stieltjes procedure run
over a composite Gauss-Jacobi rule that has the endpoint singularities built
into its panel weights.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal

from .measure import MeasureSpec, require_valid

__all__ = [
    "N_MAX_CAP",
    "RecurrenceTable",
    "QuadratureRule",
    "QuadratureError",
    "jacobi_mass",
    "jacobi_recurrence_closed_form",
    "tridiagonal_eigen",
    "gauss_rule_from_recurrence",
    "composite_quadrature",
    "stieltjes_recurrence",
    "build_recurrence",
    "log_leading_coefficients",
]

log = logging.getLogger(__name__)

N_MAX_CAP = 4096


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class RecurrenceTable:
    """``a[k]`` holds a_{k+1} (k = 0..n_max-1); ``b[k]`` holds b_k."""

    a: np.ndarray
    b: np.ndarray
    mass: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("a and b must be 1-d arrays of equal length")
        if np.any(~(a > 0)):
            raise ValueError("recurrence coefficients a_n must be positive")
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "mass", float(self.mass))

    @property
    def n_max(self) -> int:
        return len(self.a)

    def a_n(self, n: int) -> float:
        return float(self.a[n - 1])

    def b_n(self, n: int) -> float:
        return float(self.b[n])


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if x.shape != w.shape:
            raise ValueError("nodes and weights differ in length")
        x.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def total(self) -> float:
        return math.fsum(self.weights)

    def integrate(self, values) -> float:
        """Apply the rule to function values sampled at ``nodes``."""
        return float(np.dot(self.weights, values))

    def apply(self, f) -> float:
        return self.integrate(f(self.nodes))


def jacobi_mass(alpha: float, beta: float) -> float:
    """``int (1-x)^alpha (1+x)^beta dx = 2^(alpha+beta+1) B(alpha+1, beta+1)``."""
    return math.exp(
        (alpha + beta + 1.0) * math.log(2.0)
        + math.lgamma(alpha + 1.0)
        + math.lgamma(beta + 1.0)
        - math.lgamma(alpha + beta + 2.0)
    )


def _check_n_max(n_max: int):
    if not 1 <= n_max <= N_MAX_CAP:
        raise ValueError(f"n_max must lie in [1, {N_MAX_CAP}]")


def jacobi_recurrence_closed_form(alpha: float, beta: float, n_max: int) -> RecurrenceTable:
    """Orthonormal recurrence for ``(1-x)^alpha (1+x)^beta`` on [-1, 1]."""
    if not (alpha > -1 and beta > -1):
        raise ValueError("Jacobi exponents must exceed -1")
    _check_n_max(n_max)
    s = alpha + beta
    n = np.arange(1, n_max, dtype=float)
    b = np.empty(n_max)
    b[0] = (beta - alpha) / (s + 2.0)
    t = 2.0 * n + s
    b[1:] = (beta * beta - alpha * alpha) / (t * (t + 2.0))

    a = np.empty(n_max)
    a[0] = math.sqrt(4.0 * (alpha + 1.0) * (beta + 1.0) / ((s + 2.0) ** 2 * (s + 3.0)))
    if n_max > 1:
        m = np.arange(2, n_max + 1, dtype=float)
        t = 2.0 * m + s
        a[1:] = np.sqrt(4.0 * m * (m + alpha) * (m + beta) * (m + s) / (t * t * (t + 1.0) * (t - 1.0)))
    return RecurrenceTable(a, b, jacobi_mass(alpha, beta))


def tridiagonal_eigen(diag, offdiag) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and first eigenvector components of a symmetric
    tridiagonal matrix."""
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    n = len(diag)
    if n == 1:
        return diag.copy(), np.ones(1)
    if n <= 64 or np.any(offdiag == 0):
        vals, vecs = eigh_tridiagonal(diag, offdiag)
        return vals, vecs[0, :]
    vals = eigvalsh_tridiagonal(diag, offdiag)
    # The unnormalized eigenvector for lam has components q_k(lam) from the
    # three-term recurrence with q_0 = 1, so v_0^2 = 1 / sum_k q_k^2.  That sum
    # varies on an O(n^-2) scale near the spectrum ends, so each eigenvalue is
    # Newton-polished in extended precision before the sum is formed.
    ld = np.longdouble
    d = diag.astype(ld)
    e = offdiag.astype(ld)
    lam = vals.astype(ld)
    for _ in range(2):
        q, dq, ssq = _char_recurrence(lam, d, e)
        step = q / dq
        ok = np.isfinite(step) & (np.abs(step) < 1e-10)
        lam = np.where(ok, lam - step, lam)
    _, _, ssq = _char_recurrence(lam, d, e)
    return lam.astype(float), (1.0 / np.sqrt(ssq)).astype(float)


def _char_recurrence(lam, d, e):
    """``q_n(lam)``, its derivative, and ``sum_{k<n} q_k(lam)^2`` for the monic-free
    recurrence ``e_k q_{k+1} = (lam - d_k) q_k - e_{k-1} q_{k-1}`` (``e_{n-1} := 1``)."""
    n = len(d)
    q_prev = np.zeros_like(lam)
    dq_prev = np.zeros_like(lam)
    q = np.ones_like(lam)
    dq = np.zeros_like(lam)
    ssq = np.ones_like(lam)
    for k in range(n):
        ek = e[k] if k < n - 1 else 1
        back = e[k - 1] if k else 0
        q_next = ((lam - d[k]) * q - back * q_prev) / ek
        dq_next = ((lam - d[k]) * dq + q - back * dq_prev) / ek
        q_prev, q = q, q_next
        dq_prev, dq = dq, dq_next
        if k < n - 1:
            ssq += q * q
    return q, dq, ssq


def gauss_rule_from_recurrence(table: RecurrenceTable, n_points: int) -> QuadratureRule:
    """Golub-Welsch: nodes are the eigenvalues of the leading ``n_points`` Jacobi
    matrix, weights ``mass * v_0^2``."""
    if not 1 <= n_points <= table.n_max:
        raise ValueError(f"need n_points <= n_max = {table.n_max}, got {n_points}")
    nodes, first = tridiagonal_eigen(table.b[:n_points], table.a[: n_points - 1])
    weights = table.mass * first**2
    return QuadratureRule(nodes, weights, 2 * n_points - 1)


@functools.lru_cache(maxsize=64)
def _gauss_jacobi(alpha: float, beta: float, n: int) -> QuadratureRule:
    return gauss_rule_from_recurrence(jacobi_recurrence_closed_form(alpha, beta, n), n)


def _panel_rule(alpha: float, beta: float, n: int, lo: float, hi: float):
    """Gauss rule for ``(hi-x)^alpha (x-lo)^beta`` on [lo, hi]."""
    base = _gauss_jacobi(float(alpha), float(beta), int(n))
    half = 0.5 * (hi - lo)
    x = lo + half * (base.nodes + 1.0)
    w = base.weights * half ** (alpha + beta + 1.0)
    return x, w


def composite_quadrature(spec: MeasureSpec, n_per_panel: int) -> QuadratureRule:
    """Rule integrating smooth ``f`` against ``d mu`` for ``spec``.

    Panels break at every piece boundary and at the edge window start.  The
    leftmost panel carries ``(1+x)^beta`` in its Gauss weight, the rightmost
    ``(1-x)^alpha``; everything else, including ``h_eff``, is folded into
    the returned weights.
    """
    require_valid(spec)
    if n_per_panel < 1:
        raise ValueError("n_per_panel must be positive")
    edges = [-1.0, *spec.breakpoints(), 1.0]
    xs, ws = [], []
    last = len(edges) - 2
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        ea = spec.alpha if i == last else 0.0
        eb = spec.beta if i == 0 else 0.0
        x, w = _panel_rule(ea, eb, n_per_panel, lo, hi)
        smooth = np.ones_like(x)
        if i != last:
            smooth *= (1.0 - x) ** spec.alpha
        if i != 0:
            smooth *= (1.0 + x) ** spec.beta
        # evaluate h_eff at the panel midpoint's owner to avoid boundary ties
        h = _h_on_panel(spec, lo, hi, x)
        xs.append(x)
        ws.append(w * smooth * h)
    nodes = np.concatenate(xs)
    weights = np.concatenate(ws)
    if np.any(~(weights > 0)):
        raise QuadratureError("non-positive quadrature weight; h_eff vanishes on a panel")
    if np.any(np.diff(nodes) <= 0) or nodes[0] <= -1.0 or nodes[-1] >= 1.0:
        raise QuadratureError("composite nodes not strictly increasing inside (-1, 1)")
    return QuadratureRule(nodes, weights, 2 * n_per_panel - 1)


def _h_on_panel(spec: MeasureSpec, lo: float, hi: float, x: np.ndarray) -> np.ndarray:
    mid = 0.5 * (lo + hi)
    for p in spec.pieces:
        if p.lo <= mid <= p.hi:
            return np.broadcast_to(np.asarray(p.expr(x), dtype=float), x.shape)
    return np.broadcast_to(np.asarray(spec.h(x), dtype=float), x.shape)


def stieltjes_recurrence(spec: MeasureSpec, n_max: int, rule: QuadratureRule) -> RecurrenceTable:
    """Discrete Stieltjes procedure with inner products taken by ``rule``.

    ``rule`` must integrate polynomials of degree ``2 n_max + 1`` against
    ``spec`` accurately; ``spec`` only serves as a validity check here.
    """
    require_valid(spec)
    _check_n_max(n_max)
    if len(rule) < n_max + 1 or rule.exact_degree < 2 * n_max + 1:
        raise QuadratureError(
            f"rule with {len(rule)} nodes (degree {rule.exact_degree}) too short for n_max={n_max}"
        )
    x = rule.nodes
    w = rule.weights
    mass = math.fsum(w)
    a = np.empty(n_max)
    b = np.empty(n_max)
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / math.sqrt(mass))
    a_prev = 0.0
    for k in range(n_max):
        wp = w * p
        b[k] = np.dot(wp, x * p)
        q = (x - b[k]) * p - a_prev * p_prev
        norm2 = np.dot(w * q, q)
        if not norm2 > 0 or not math.isfinite(norm2):
            raise QuadratureError(f"loss of positivity at a_{k + 1}; quadrature inadequate")
        a[k] = math.sqrt(norm2)
        p_prev, p = p, q / a[k]
        a_prev = a[k]
    return RecurrenceTable(a, b, mass)


def build_recurrence(spec: MeasureSpec, n_max: int, n_per_panel: int | None = None, check: bool = True) -> RecurrenceTable:
    """Stieltjes table for ``spec`` with the default rule size ``2 n_max + 16``.

    With ``check`` the rule is doubled once and every coefficient must move by
    less than 1e-12; a shortfall raises QuadratureError.
    """
    n_per_panel = n_per_panel or 2 * n_max + 16
    table = stieltjes_recurrence(spec, n_max, composite_quadrature(spec, n_per_panel))
    if check:
        fine = stieltjes_recurrence(spec, n_max, composite_quadrature(spec, 2 * n_per_panel))
        drift = max(np.max(np.abs(table.a - fine.a)), np.max(np.abs(table.b - fine.b)))
        log.debug("recurrence drift under rule doubling: %.3e", drift)
        if drift >= 1e-12:
            raise QuadratureError(f"recurrence not stable under rule doubling (drift {drift:.3e})")
    return table


def log_leading_coefficients(table: RecurrenceTable) -> np.ndarray:
    """``log gamma_n`` for n = 0..n_max, from ``gamma_n = gamma_{n-1} / a_n``."""
    out = np.empty(table.n_max + 1)
    out[0] = -0.5 * math.log(table.mass)
    out[1:] = out[0] - np.cumsum(np.log(table.a))
    return out
