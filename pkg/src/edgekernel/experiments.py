"""Experiment runners: sweep n over a ladder, compare with limit kernels, fit rates.

Every runner returns a ConvergenceReport whose rows are ordered by
(n, a, b) and whose ``abs_error`` column is exactly ``|computed - limit|``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .config import ConfigError, ExperimentConfig
from .expr import Const, format_expr
from .kernels import KernelEvaluator
from .measure import MeasureSpec, Piece, eval_weight, validate_spec
from .quadrature import composite_quadrature
from .special import bessel_kernel, sine_kernel

__all__ = [
    "Row",
    "ConvergenceReport",
    "estimate_rate",
    "find_delta",
    "smoothing_measure",
    "run_edge_universality",
    "run_christoffel_ratio",
    "run_localization",
    "check_kernel_inequalities",
    "run_smoothing",
    "run_bulk_sine",
    "EXPERIMENTS",
    "CSV_HEADER",
]

log = logging.getLogger(__name__)

CSV_HEADER = ("experiment", "n", "a", "b", "x", "computed", "limit", "abs_error")
INEQUALITY_SLACK = 1e-8


@dataclass(frozen=True)
class Row:
    experiment: str
    n: int
    a: float | None
    b: float | None
    x: float | None
    computed: float
    limit: float

    @property
    def abs_error(self) -> float:
        return abs(self.computed - self.limit)


@dataclass
class ConvergenceReport:
    experiment: str
    rows: list[Row]
    n_ladder: list[int]
    sup_error_per_n: list[float]
    fitted_rate: float
    passed: bool
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow(
                [r.experiment, r.n, _fmt(r.a), _fmt(r.b), _fmt(r.x), _fmt(r.computed), _fmt(r.limit), _fmt(r.abs_error)]
            )
        return buf.getvalue()

    def summary(self) -> dict:
        rate = self.fitted_rate
        out = {
            "experiment": self.experiment,
            "sup_error_per_n": list(self.sup_error_per_n),
            "fitted_rate": None if math.isinf(rate) or math.isnan(rate) else rate,
            "pass": bool(self.passed),
            "n_ladder": list(self.n_ladder),
            "checks": {k: bool(v) for k, v in self.checks.items()},
        }
        out.update(self.details)
        return out

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=False)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def estimate_rate(ns, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(n)``.

    Returns ``-inf`` when any error is exactly zero.
    """
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(ns) != len(errors):
        raise ValueError("ns and errors differ in length")
    if len(ns) < 3:
        raise ValueError("rate fit needs at least three ladder points")
    if np.any(errors < 0) or np.any(~np.isfinite(errors)):
        raise ValueError("errors must be finite and nonnegative")
    if np.any(errors == 0):
        return -math.inf
    lx = np.log(ns)
    ly = np.log(errors)
    lx_c = lx - lx.mean()
    return float(np.dot(lx_c, ly - ly.mean()) / np.dot(lx_c, lx_c))


def _rate_or_nan(ns, errors) -> float:
    try:
        return estimate_rate(ns, errors)
    except ValueError:
        return math.nan


def _strictly_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def _require(spec: MeasureSpec):
    report = validate_spec(spec)
    if not report.ok:
        raise ConfigError("invalid measure: " + "; ".join(report.violations))
    return report


def _evaluator(spec: MeasureSpec, cfg: ExperimentConfig, n_max: int) -> KernelEvaluator:
    _require(spec)
    return KernelEvaluator.for_spec(spec, n_max, cfg.n_per_panel)


def _sup_by_n(rows: list[Row], ladder) -> list[float]:
    return [max((r.abs_error for r in rows if r.n == n), default=0.0) for n in ladder]


def _row_key(r: Row):
    # stable sort, so rows sharing (n, a, b) keep their generation order
    return (r.n, -math.inf if r.a is None else r.a, -math.inf if r.b is None else r.b)


def _finish(name, rows, ladder, sups, checks, details=None, rate=None, sort=True) -> ConvergenceReport:
    if sort:
        rows = sorted(rows, key=_row_key)
    if rate is None:
        rate = _rate_or_nan(ladder, sups)
    passed = all(checks.values())
    for key, ok in checks.items():
        log.info("%s: %s %s", name, key, "ok" if ok else "FAILED")
    return ConvergenceReport(name, rows, list(ladder), list(sups), rate, passed, checks, details or {})


def run_edge_universality(cfg: ExperimentConfig) -> ConvergenceReport:
    """Edge-scaled normalized kernel against the Bessel kernel over the (a, b) grid."""
    spec = cfg.measure
    alpha = spec.alpha
    ladder = cfg.n_ladder
    agrid, bgrid = cfg.edge_grid(), cfg.edge_grid_b()
    if alpha < 0 and (min(agrid) <= 0 or min(bgrid) <= 0):
        raise ConfigError("edge grid must exclude 0 when alpha < 0")
    ev = _evaluator(spec, cfg, max(ladder) + 1)
    limits = {(a, b): bessel_kernel(alpha, a, b) for a in agrid for b in bgrid}
    rows = []
    for n in ladder:
        for a in agrid:
            for b in bgrid:
                rows.append(Row("edge", n, a, b, 1.0 - a / (2.0 * n * n), ev.edge_scaled_kernel(n, a, b), limits[a, b]))
    sups = _sup_by_n(rows, ladder)
    rate = _rate_or_nan(ladder, sups)
    checks = {"sup_error_strictly_decreasing": _strictly_decreasing(sups)}
    if cfg.rate_band is not None and len(ladder) >= 3:
        lo, hi = cfg.rate_band
        checks["fitted_rate_in_band"] = lo <= rate <= hi
    return _finish("edge", rows, ladder, sups, checks, {"rate_band": cfg.rate_band}, rate)


def run_christoffel_ratio(cfg: ExperimentConfig) -> ConvergenceReport:
    """``lambda_n / lambda_n^(alpha,beta)`` at ``1 - a/(2n^2)`` against ``h(1)``."""
    spec = cfg.measure
    h1 = _require(spec).h_at_edge
    ladder = cfg.n_ladder
    agrid = cfg.edge_grid()
    n_max = max(ladder) + 1
    ev = _evaluator(spec, cfg, n_max)
    jac = KernelEvaluator.jacobi(spec.alpha, spec.beta, n_max)
    rows = []
    scaled = {a: [] for a in agrid}
    for n in ladder:
        for a in agrid:
            x = 1.0 - a / (2.0 * n * n)
            lam = ev.christoffel(n, x)
            rows.append(Row("ratio", n, a, None, x, lam / jac.christoffel(n, x), h1))
            scaled[a].append(n ** (2.0 * spec.alpha + 2.0) * lam)
    sups = _sup_by_n(rows, ladder)
    spread = max(max(v) / min(v) for v in scaled.values())
    flat = [v for vals in scaled.values() for v in vals]
    checks = {
        "sup_error_strictly_decreasing": _strictly_decreasing(sups) or max(sups) == 0.0,
        "final_sup_error_below_tol": sups[-1] < cfg.ratio_tol,
        "scaled_christoffel_band_within_3x": spread <= 3.0,
    }
    details = {
        "h_at_edge": h1,
        "scaled_christoffel_band": [min(flat), max(flat)],
        "scaled_christoffel_max_spread_across_ladder": spread,
    }
    return _finish("ratio", rows, ladder, sups, checks, details)


def _agree_on_edge(mu: MeasureSpec, star: MeasureSpec) -> bool:
    return (
        mu.alpha == star.alpha
        and mu.beta == star.beta
        and format_expr(mu.h) == format_expr(star.h)
    )


def _pair(cfg: ExperimentConfig) -> tuple[MeasureSpec, MeasureSpec]:
    if cfg.measure_star is None:
        raise ConfigError("experiment needs a second measure (star_* keys)")
    mu, star = cfg.measure, cfg.measure_star
    _require(mu)
    _require(star)
    if not _agree_on_edge(mu, star):
        raise ConfigError("measures do not agree on the edge window J")
    return mu, star


def run_localization(cfg: ExperimentConfig) -> ConvergenceReport:
    """``|K_n - K_n^*| / n^(2 alpha + 2)`` on the edge grid for two measures equal near 1."""
    mu, star = _pair(cfg)
    ladder = cfg.n_ladder
    agrid, bgrid = cfg.edge_grid(), cfg.edge_grid_b()
    n_max = max(ladder) + 1
    ev, ev_star = _evaluator(mu, cfg, n_max), _evaluator(star, cfg, n_max)
    rows = []
    for n in ladder:
        norm = n ** (2.0 * mu.alpha + 2.0)
        for a in agrid:
            for b in bgrid:
                diff = abs(ev.edge_kernel(n, a, b) - ev_star.edge_kernel(n, a, b)) / norm
                rows.append(Row("localization", n, a, b, 1.0 - a / (2.0 * n * n), diff, 0.0))
    sups = _sup_by_n(rows, ladder)
    identical = max(sups) == 0.0
    checks = {
        "sup_difference_strictly_decreasing": identical or _strictly_decreasing(sups),
        "final_below_half_of_first": identical or sups[-1] < 0.5 * sups[0],
    }
    return _finish("localization", rows, ladder, sups, checks)


def _dominated(mu: MeasureSpec, star: MeasureSpec, points: int = 10_000) -> bool:
    x = np.linspace(-1.0, 1.0, points + 2)[1:-1]
    return bool(np.all(eval_weight(mu, x) <= eval_weight(star, x) * (1.0 + 1e-14)))


def check_kernel_inequalities(cfg: ExperimentConfig) -> ConvergenceReport:
    """L2 kernel-difference bound and the Christoffel-function estimate.

    For ``d mu <= d mu*``: ``int (K_n - K_n^*)(x, .)^2 d mu <= K_n(x,x) - K_n^*(x,x)``
    at ``x = 1 - a/(2n^2)``, and ``|P(y)| <= K_n(y,y)^(1/2) ||P||_mu`` for random
    ``P`` of degree below n.
    """
    mu, star = _pair(cfg)
    if not _dominated(mu, star):
        raise ConfigError("inequality check needs d mu <= d mu* pointwise")
    ns = cfg.inequality_n
    agrid = cfg.edge_grid()
    n_max = max(ns) + 1
    ev, ev_star = _evaluator(mu, cfg, n_max), _evaluator(star, cfg, n_max)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    ok33 = ok34 = True
    worst33 = worst34 = -math.inf
    excess = []
    for n in ns:
        excess_n = 0.0
        rule = composite_quadrature(mu, 2 * n + 16)
        t = rule.nodes
        for a in agrid:
            x = 1.0 - a / (2.0 * n * n)
            diff = ev.kernel(n, x, t) - ev_star.kernel(n, x, t)
            lhs = rule.integrate(diff * diff)
            kxx = ev.kernel(n, x, x)
            rhs = kxx - ev_star.kernel(n, x, x)
            margin = (lhs - rhs) / max(1.0, kxx)
            worst33 = max(worst33, margin)
            ok33 &= margin <= INEQUALITY_SLACK
            excess_n = max(excess_n, lhs - rhs)
            rows.append(Row("l2_difference", n, a, None, x, lhs, rhs))
        basis = ev.orthopoly_values(n, t)
        for j in range(cfg.n_random):
            coef = rng.standard_normal(n)
            if j % 2 == 0:
                y = 1.0 - agrid[j // 2 % len(agrid)] / (2.0 * n * n)
            else:
                y = float(rng.uniform(-1.0, 1.0))
            py = float(coef @ ev.orthopoly_values(n, y))
            norm2 = rule.integrate((coef @ basis) ** 2)
            bound = math.sqrt(ev.kernel(n, y, y) * norm2)
            worst34 = max(worst34, abs(py) / bound - 1.0)
            ok34 &= abs(py) <= bound * (1.0 + INEQUALITY_SLACK)
            rows.append(Row("christoffel_estimate", n, None, None, y, abs(py), bound))
        excess.append(max(excess_n, 0.0))
    checks = {"l2_difference_bound": ok33, "christoffel_estimate": ok34}
    details = {"worst_relative_margin_l2": worst33, "worst_relative_excess_christoffel": worst34}
    return _finish("inequalities", rows, list(ns), excess, checks, details, rate=math.nan)


def find_delta(spec: MeasureSpec, eps: float, scan_points: int = 4096) -> float:
    """Largest dyadic ``delta <= rho`` with ``(1+eps)^-1 <= h/h(1) <= 1+eps`` on ``[1-delta, 1]``."""
    h1 = float(spec.h(1.0))
    lo_bound, hi_bound = 1.0 / (1.0 + eps), 1.0 + eps
    delta = 2.0 ** math.floor(math.log2(spec.rho))
    while delta > 2.0**-40:
        if delta <= spec.rho:
            x = np.linspace(1.0 - delta, 1.0, scan_points)
            ratio = np.asarray(spec.h(x), dtype=float) / h1
            if np.all((ratio >= lo_bound) & (ratio <= hi_bound)):
                return delta
        delta /= 2.0
    raise ConfigError(f"no window around 1 keeps h within (1+eps)^(+-1) of h(1) for eps={eps}")


def smoothing_measure(spec: MeasureSpec, delta: float) -> MeasureSpec:
    """``h w^(alpha,beta)`` on ``[1-delta, 1]``, ``h(1) w^(alpha,beta)`` elsewhere."""
    h1 = Const(float(spec.h(1.0)))
    return MeasureSpec(spec.alpha, spec.beta, spec.h, (Piece(-1.0, 1.0 - delta, h1),), delta)


def run_smoothing(cfg: ExperimentConfig) -> ConvergenceReport:
    """``sup |K_n - K_n^#| / n^(2 alpha + 2)`` against epsilon, ``w^# = h(1) w^(alpha,beta)``."""
    spec = cfg.measure
    h1 = _require(spec).h_at_edge
    n = max(cfg.n_ladder)
    n_half = n // 2
    eps_list = sorted(cfg.epsilon_list, reverse=True)
    agrid, bgrid = cfg.edge_grid(), cfg.edge_grid_b()
    sharp_spec = MeasureSpec(spec.alpha, spec.beta, Const(h1))
    ev_sharp = _evaluator(sharp_spec, cfg, n + 1)
    rows = []
    sups, sups_half, deltas = [], [], []
    for eps in eps_list:
        delta = find_delta(spec, eps)
        deltas.append(delta)
        ev = _evaluator(smoothing_measure(spec, delta), cfg, n + 1)
        label = f"smoothing[eps={eps!r}]"
        for m, bucket in ((n, sups), (n_half, sups_half)):
            norm = m ** (2.0 * spec.alpha + 2.0)
            best = 0.0
            for a in agrid:
                for b in bgrid:
                    diff = abs(ev.edge_kernel(m, a, b) - ev_sharp.edge_kernel(m, a, b)) / norm
                    best = max(best, diff)
                    if m == n:
                        rows.append(Row(label, m, a, b, 1.0 - a / (2.0 * m * m), diff, 0.0))
            bucket.append(best)
    zero = max(sups) == 0.0
    per_root_eps = [s / math.sqrt(e) for s, e in zip(sups, eps_list)]
    spread = max(per_root_eps) / min(per_root_eps) if not zero and min(per_root_eps) > 0 else (1.0 if zero else math.inf)
    doubling = [
        (max(s, t) / min(s, t)) if min(s, t) > 0 else (1.0 if s == t else math.inf) for s, t in zip(sups, sups_half)
    ]
    checks = {
        "sup_difference_monotone_in_eps": all(b <= a for a, b in zip(sups, sups[1:])),
        "sup_over_root_eps_within_10x": spread <= 10.0,
        "n_doubling_within_3x": all(d <= 3.0 for d in doubling),
    }
    rate = _rate_or_nan(eps_list, sups) if not zero else -math.inf
    details = {
        "n": n,
        "epsilon_list": eps_list,
        "delta_per_eps": deltas,
        "sup_over_root_eps": per_root_eps,
        "sup_difference_at_half_n": sups_half,
        "fitted_rate_is_in": "epsilon",
    }
    return _finish("smoothing", rows, [n] * len(eps_list), sups, checks, details, rate, sort=False)


def run_bulk_sine(cfg: ExperimentConfig) -> ConvergenceReport:
    """Bulk-scaled normalized kernel against the sine kernel at each centre."""
    spec = cfg.measure
    _require(spec)
    ladder = cfg.n_ladder
    grid = cfg.bulk_grid
    ev = _evaluator(spec, cfg, max(ladder) + 1)
    rows = []
    for n in ladder:
        for x in cfg.x_points:
            for a in grid:
                for b in grid:
                    rows.append(Row("bulk", n, a, b, x, ev.bulk_scaled_kernel(n, x, a, b), sine_kernel(a, b)))
    sups = _sup_by_n(rows, ladder)
    checks = {
        "sup_error_strictly_decreasing": _strictly_decreasing(sups),
        "final_sup_error_below_tol": sups[-1] < cfg.bulk_tol,
    }
    return _finish("bulk", rows, ladder, sups, checks)


EXPERIMENTS = {
    "edge": run_edge_universality,
    "ratio": run_christoffel_ratio,
    "localization": run_localization,
    "smoothing": run_smoothing,
    "bulk": run_bulk_sine,
    "inequalities": check_kernel_inequalities,
}
