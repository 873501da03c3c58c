"""Generalized Jacobi measures ``h(x) (1-x)^alpha (1+x)^beta dx`` on [-1, 1]."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .expr import Const, WeightExpr, format_expr, parse_weight_expr

__all__ = [
    "Piece",
    "MeasureSpec",
    "Validation",
    "InvalidSpecError",
    "eval_weight",
    "edge_weight",
    "validate_spec",
    "require_valid",
    "legendre",
]

EDGE_GRID_POINTS = 1024


class InvalidSpecError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid measure: " + "; ".join(self.violations))


@dataclass(frozen=True)
class Piece:
    """Replacement of ``h`` on the closed interval ``[lo, hi]``."""

    lo: float
    hi: float
    expr: WeightExpr

    @classmethod
    def parse(cls, text: str) -> "Piece":
        """Parse ``"<lo>,<hi>,<expr>"``."""
        parts = text.split(",", 2)
        if len(parts) != 3:
            raise ValueError(f"piece must be '<lo>,<hi>,<expr>', got {text!r}")
        return cls(float(parts[0]), float(parts[1]), parse_weight_expr(parts[2]))


@dataclass(frozen=True)
class MeasureSpec:
    alpha: float = 0.0
    beta: float = 0.0
    h: WeightExpr = field(default_factory=lambda: Const(1.0))
    pieces: tuple[Piece, ...] = ()
    rho: float = 0.5

    @classmethod
    def from_strings(cls, alpha=0.0, beta=0.0, h="1", pieces=(), rho=0.5) -> "MeasureSpec":
        parsed = tuple(p if isinstance(p, Piece) else Piece.parse(p) for p in pieces)
        hexpr = h if not isinstance(h, str) else parse_weight_expr(h)
        return cls(float(alpha), float(beta), hexpr, parsed, float(rho))

    @property
    def edge_start(self) -> float:
        return 1.0 - self.rho

    def breakpoints(self) -> list[float]:
        """Interior points where the effective ``h`` may switch expression."""
        pts = {self.edge_start} if self.rho < 2.0 else set()
        for p in self.pieces:
            pts.update((p.lo, p.hi))
        return sorted(t for t in pts if -1.0 < t < 1.0)

    def h_eff(self, x):
        """Piece expression covering ``x`` if any, otherwise ``h``."""
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.h(x), dtype=float)
        if out.shape != x.shape:
            out = np.broadcast_to(out, x.shape).copy()
        for p in self.pieces:
            mask = (x >= p.lo) & (x <= p.hi)
            if np.any(mask):
                out = np.where(mask, p.expr(x), out)
        return out if out.ndim else float(out)

    def describe(self) -> str:
        pieces = "".join(f"; piece [{p.lo}, {p.hi}] -> {format_expr(p.expr)}" for p in self.pieces)
        return (
            f"alpha={self.alpha}, beta={self.beta}, h={format_expr(self.h)}, "
            f"rho={self.rho}{pieces}"
        )


def legendre() -> MeasureSpec:
    return MeasureSpec()


def eval_weight(spec: MeasureSpec, x):
    """Weight ``h_eff(x) (1-x)^alpha (1+x)^beta`` for ``x`` strictly inside (-1, 1)."""
    xa = np.asarray(x, dtype=float)
    if np.any(~((xa > -1.0) & (xa < 1.0))):
        raise ValueError("eval_weight requires -1 < x < 1")
    w = spec.h_eff(xa) * (1.0 - xa) ** spec.alpha * (1.0 + xa) ** spec.beta
    return w if np.ndim(w) else float(w)


def edge_weight(spec: MeasureSpec, t):
    """Weight at ``x = 1 - t`` computed from the offset ``t`` (no cancellation).

    ``t = 0`` is accepted when ``alpha >= 0``.
    """
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0) or np.any(ta >= 2.0):
        raise ValueError("edge offset must satisfy 0 <= t < 2")
    if spec.alpha < 0 and np.any(ta == 0):
        raise ValueError("weight is infinite at x = 1 for alpha < 0")
    w = spec.h_eff(1.0 - ta) * ta ** spec.alpha * (2.0 - ta) ** spec.beta
    return w if np.ndim(w) else float(w)


@dataclass(frozen=True)
class Validation:
    violations: tuple[str, ...]
    h_at_edge: float

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_spec(spec: MeasureSpec) -> Validation:
    """Check exponent ranges, edge positivity of ``h`` and piece layout."""
    problems = []
    if not spec.alpha > -1.0:
        problems.append("alpha <= -1")
    if not spec.beta > -1.0:
        problems.append("beta <= -1")
    if not 0.0 < spec.rho <= 2.0:
        problems.append("rho outside (0, 2]")
        rho = min(max(spec.rho, 1e-3), 2.0)
    else:
        rho = spec.rho

    with np.errstate(all="ignore"):
        h1 = float(spec.h(1.0))
        edge = np.linspace(1.0 - rho, 1.0, EDGE_GRID_POINTS)
        hv = np.asarray(spec.h(edge), dtype=float)
    if not np.all(np.isfinite(hv)):
        problems.append("h not finite on edge window")
    elif not (h1 > 0 and np.all(hv > 0)):
        problems.append("h not positive at edge")

    edge_lo = 1.0 - rho
    ordered = sorted(spec.pieces, key=lambda p: p.lo)
    for k, p in enumerate(ordered):
        if not p.lo < p.hi:
            problems.append(f"piece [{p.lo}, {p.hi}] is empty")
        if p.lo < -1.0 or p.hi > edge_lo:
            problems.append(f"piece [{p.lo}, {p.hi}] not inside [-1, {edge_lo}]")
        if k and ordered[k - 1].hi >= p.lo:
            problems.append(f"pieces [{ordered[k - 1].lo}, {ordered[k - 1].hi}] and [{p.lo}, {p.hi}] overlap")
        lo, hi = max(p.lo, -1.0), min(p.hi, 1.0)
        if lo < hi:
            with np.errstate(all="ignore"):
                pv = np.asarray(p.expr(np.linspace(lo, hi, 257)), dtype=float)
            if not np.all(np.isfinite(pv)) or np.any(pv < 0):
                problems.append(f"piece [{p.lo}, {p.hi}] expression negative or not finite")

    with np.errstate(all="ignore"):
        interior = np.linspace(-1.0, 1.0, 4097)[1:-1]
        hv = np.asarray(spec.h_eff(interior), dtype=float)
    if not np.all(np.isfinite(hv)) or np.any(hv < 0):
        problems.append("effective h negative or not finite in (-1, 1)")

    return Validation(tuple(problems), h1)


def require_valid(spec: MeasureSpec) -> Validation:
    report = validate_spec(spec)
    if not report.ok:
        raise InvalidSpecError(report.violations)
    return report
