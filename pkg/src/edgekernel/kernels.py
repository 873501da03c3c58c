"""Orthonormal polynomials, reproducing kernels and Christoffel functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .measure import MeasureSpec, edge_weight, eval_weight
from .quadrature import (
    RecurrenceTable,
    build_recurrence,
    composite_quadrature,
    jacobi_recurrence_closed_form,
)

__all__ = [
    "KernelEvaluator",
    "IllConditionedError",
    "christoffel_oracle",
    "edge_bound_diagnostic",
    "CD_MIN_SEPARATION",
]

CD_MIN_SEPARATION = 1e-6
ORACLE_MAX_N = 10
ORACLE_MAX_COND = 1e13


class IllConditionedError(ArithmeticError):
    pass


@dataclass(frozen=True)
class KernelEvaluator:
    """A measure bound to its recurrence table."""

    spec: MeasureSpec
    table: RecurrenceTable

    @classmethod
    def for_spec(cls, spec: MeasureSpec, n_max: int, n_per_panel: int | None = None, check: bool = True):
        return cls(spec, build_recurrence(spec, n_max, n_per_panel, check))

    @classmethod
    def jacobi(cls, alpha: float, beta: float, n_max: int):
        """Pure Jacobi weight with closed-form coefficients."""
        return cls(MeasureSpec(alpha=alpha, beta=beta), jacobi_recurrence_closed_form(alpha, beta, n_max))

    def _require_n(self, n: int, limit: int | None = None):
        limit = self.table.n_max if limit is None else limit
        if not 1 <= n <= limit:
            raise ValueError(f"n={n} outside [1, {limit}] for this table")

    def orthopoly_values(self, n: int, x):
        """``p_0(x), ..., p_{n-1}(x)`` stacked along the first axis."""
        if not 0 <= n <= self.table.n_max + 1:
            raise ValueError(f"n={n} exceeds what a table with n_max={self.table.n_max} defines")
        x = np.asarray(x, dtype=float)
        out = np.empty((n,) + x.shape)
        if n == 0:
            return out
        a, b = self.table.a, self.table.b
        out[0] = 1.0 / math.sqrt(self.table.mass)
        if n > 1:
            out[1] = (x - b[0]) * out[0] / a[0]
        for k in range(1, n - 1):
            out[k + 1] = ((x - b[k]) * out[k] - a[k - 1] * out[k - 1]) / a[k]
        return out

    def kernel(self, n: int, x, y):
        """``K_n(x, y) = sum_{k<n} p_k(x) p_k(y)`` by direct summation."""
        self._require_n(n)
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        px = self.orthopoly_values(n, x)
        py = px if np.array_equal(x, y) else self.orthopoly_values(n, y)
        # sequential accumulation keeps each entry independent of the array shape
        k = np.zeros(x.shape)
        for row_x, row_y in zip(px, py):
            k += row_x * row_y
        return k if k.ndim else float(k)

    def kernel_cd(self, n: int, x: float, y: float) -> float:
        """Christoffel-Darboux quotient form; cross-check only."""
        self._require_n(n, self.table.n_max - 1)
        if abs(x - y) < CD_MIN_SEPARATION:
            raise ValueError("arguments too close for the Christoffel-Darboux form; use kernel()")
        p = self.orthopoly_values(n + 1, np.array([x, y]))
        return float(self.table.a_n(n) * (p[n, 0] * p[n - 1, 1] - p[n, 1] * p[n - 1, 0]) / (x - y))

    def christoffel(self, n: int, x):
        """``lambda_n(x) = 1 / K_n(x, x)``."""
        k = self.kernel(n, x, x)
        return 1.0 / k

    def weight(self, x):
        return eval_weight(self.spec, x)

    def normalized_kernel(self, n: int, x, y):
        wx = eval_weight(self.spec, x)
        wy = eval_weight(self.spec, y)
        return np.sqrt(wx * wy) * self.kernel(n, x, y)

    def _edge_offsets(self, n: int, a: float, b: float):
        if a < 0 or b < 0:
            raise ValueError("edge variables must be nonnegative")
        if self.spec.alpha < 0 and (a == 0 or b == 0):
            raise ValueError("edge variables must be positive when alpha < 0")
        scale = 2.0 * n * n
        ta, tb = a / scale, b / scale
        if ta >= 2.0 or tb >= 2.0:
            raise ValueError("edge-scaled argument leaves (-1, 1]")
        return scale, ta, tb

    def edge_kernel(self, n: int, a: float, b: float) -> float:
        """Unnormalized ``K_n(1 - a/(2n^2), 1 - b/(2n^2))``."""
        self._require_n(n)
        _, ta, tb = self._edge_offsets(n, a, b)
        return self.kernel(n, 1.0 - ta, 1.0 - tb)

    def edge_scaled_kernel(self, n: int, a: float, b: float) -> float:
        """``(1/(2n^2)) K~_n(1 - a/(2n^2), 1 - b/(2n^2))``."""
        self._require_n(n)
        scale, ta, tb = self._edge_offsets(n, a, b)
        w = math.sqrt(edge_weight(self.spec, ta) * edge_weight(self.spec, tb))
        return w * self.kernel(n, 1.0 - ta, 1.0 - tb) / scale

    def bulk_scaled_kernel(self, n: int, x: float, a: float, b: float) -> float:
        """``K~_n(x + a/K~_n(x,x), x + b/K~_n(x,x)) / K~_n(x,x)``."""
        self._require_n(n)
        if not -1.0 < x < 1.0:
            raise ValueError("bulk centre must lie in (-1, 1)")
        kxx = float(self.normalized_kernel(n, x, x))
        xa, xb = x + a / kxx, x + b / kxx
        if not (-1.0 < xa < 1.0 and -1.0 < xb < 1.0):
            raise ValueError("shifted argument leaves (-1, 1)")
        return float(self.normalized_kernel(n, xa, xb)) / kxx


def christoffel_oracle(spec: MeasureSpec, n: int, x: float, n_per_panel: int = 128) -> float:
    """``lambda_n(x)`` from the moment (Hankel) matrix, independent of any recurrence.

    ``1 / (m^T G^{-1} m)`` with ``G_ij = int t^(i+j) d mu`` and ``m = (1, x, ..., x^(n-1))``.
    """
    if not 1 <= n <= ORACLE_MAX_N:
        raise ValueError(f"oracle restricted to 1 <= n <= {ORACLE_MAX_N}")
    rule = composite_quadrature(spec, n_per_panel)
    powers = rule.nodes[None, :] ** np.arange(2 * n - 1)[:, None]
    moments = powers @ rule.weights
    gram = np.array([[moments[i + j] for j in range(n)] for i in range(n)])
    cond = np.linalg.cond(gram)
    if not cond < ORACLE_MAX_COND:
        raise IllConditionedError(f"moment matrix condition number {cond:.2e}")
    try:
        factor = cho_factor(gram)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError("moment matrix not positive definite") from exc
    m = float(x) ** np.arange(n)
    return 1.0 / float(m @ cho_solve(factor, m))


def edge_bound_diagnostic(ev: KernelEvaluator, n: int, xs) -> float:
    """``max_{1<=k<n, x} |p_k(x)| (1 - x + 1/k^2)^(alpha/2 + 1/4)`` over the points ``xs``."""
    xs = np.asarray(xs, dtype=float)
    p = ev.orthopoly_values(n, xs)
    k = np.arange(1, n, dtype=float)[:, None]
    scale = (1.0 - xs[None, :] + 1.0 / k**2) ** (ev.spec.alpha / 2.0 + 0.25)
    return float(np.max(np.abs(p[1:]) * scale))
