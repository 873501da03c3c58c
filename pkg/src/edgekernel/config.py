"""Experiment configuration: a UTF-8 ``key = value`` text format.

Lines starting with ``#`` are comments.  Values may be double-quoted (needed
only when they contain ``#``).  ``piece`` and ``star_piece`` may repeat; every
other key appears at most once.  Keys prefixed ``star_`` describe the second
measure of a localization or inequality pair and fall back to the base values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .expr import ExprSyntaxError, parse_weight_expr
from .measure import MeasureSpec, Piece

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "load_config"]


class ConfigError(ValueError):
    pass


MEASURE_KEYS = ("alpha", "beta", "h", "rho")
REPEATABLE = {"piece", "star_piece"}
SCALAR_FLOAT = {"A", "a_min", "ratio_tol", "bulk_tol", "x", "y"}
SCALAR_INT = {"seed", "n_per_panel", "n", "n_random", "n_cap"}
LISTS = {"n_ladder", "a_grid", "b_grid", "bulk_grid", "x_points", "epsilon_list", "inequality_n", "x_grid", "rate_band"}
KNOWN = (
    set(MEASURE_KEYS)
    | {"star_" + k for k in MEASURE_KEYS}
    | REPEATABLE
    | SCALAR_FLOAT
    | SCALAR_INT
    | LISTS
    | {"output"}
)


@dataclass(frozen=True)
class ExperimentConfig:
    measure: MeasureSpec = field(default_factory=MeasureSpec)
    measure_star: MeasureSpec | None = None
    n_ladder: tuple[int, ...] = (64, 128, 256, 512)
    A: float = 10.0
    a_min: float = 0.25
    a_grid: tuple[float, ...] | None = None
    b_grid: tuple[float, ...] | None = None
    bulk_grid: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0)
    x_points: tuple[float, ...] = (-0.3, 0.0, 0.4)
    epsilon_list: tuple[float, ...] = (0.2, 0.05, 0.0125)
    inequality_n: tuple[int, ...] = (16, 64, 256)
    n_random: int = 50
    rate_band: tuple[float, float] | None = (-1.5, -0.6)
    ratio_tol: float = 0.05
    bulk_tol: float = 0.02
    n_per_panel: int | None = None
    n_cap: int = 1024
    seed: int = 0
    output: str | None = None
    # single-evaluation subcommands
    n: int | None = None
    x: float | None = None
    y: float | None = None
    x_grid: tuple[float, ...] | None = None

    def __post_init__(self):
        ladder = tuple(int(n) for n in self.n_ladder)
        if not ladder or any(n < 1 for n in ladder) or any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("n_ladder must be a strictly increasing list of positive counts")
        if max(ladder) > self.n_cap:
            raise ConfigError(f"n_ladder exceeds n_cap = {self.n_cap}")
        if self.a_min < 0 or self.A <= self.a_min:
            raise ConfigError("need 0 <= a_min < A")
        for name in ("a_grid", "b_grid"):
            grid = getattr(self, name)
            if grid is not None and any(not 0 <= g <= self.A for g in grid):
                raise ConfigError(f"{name} must lie in [0, A]")
        if self.measure.alpha < 0 and self.a_min <= 0:
            raise ConfigError("a_min must be positive when alpha < 0")
        if self.measure.alpha < 0 and any(g <= 0 for g in self.edge_grid()):
            raise ConfigError("edge grid must exclude 0 when alpha < 0")
        object.__setattr__(self, "n_ladder", ladder)

    def edge_grid(self) -> tuple[float, ...]:
        if self.a_grid is not None:
            return tuple(self.a_grid)
        return tuple(float(v) for v in np.linspace(self.a_min, self.A, 8))

    def edge_grid_b(self) -> tuple[float, ...]:
        return tuple(self.b_grid) if self.b_grid is not None else self.edge_grid()


def _unquote(raw: str) -> str:
    raw = raw.strip()
    if raw.startswith('"'):
        end = raw.find('"', 1)
        if end < 0:
            raise ConfigError(f"unterminated quoted value: {raw}")
        return raw[1:end]
    return raw.split("#", 1)[0].strip()


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _measure(values: dict, pieces: list[str], prefix: str = "", base: MeasureSpec | None = None) -> MeasureSpec:
    def get(key, default):
        return values.get(prefix + key, default)

    try:
        h = get("h", None)
        hexpr = parse_weight_expr(h) if h is not None else (base.h if base else parse_weight_expr("1"))
        parsed = tuple(Piece.parse(p) for p in pieces) if pieces or base is None else base.pieces
        return MeasureSpec(
            alpha=float(get("alpha", base.alpha if base else 0.0)),
            beta=float(get("beta", base.beta if base else 0.0)),
            h=hexpr,
            pieces=parsed,
            rho=float(get("rho", base.rho if base else 0.5)),
        )
    except ExprSyntaxError as exc:
        raise ConfigError(f"bad weight expression: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(text: str) -> ExperimentConfig:
    values: dict[str, str] = {}
    pieces: dict[str, list[str]] = {"piece": [], "star_piece": []}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in stripped.split("=", 1))
        if key not in KNOWN:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        value = _unquote(raw)
        if key in REPEATABLE:
            pieces[key].append(value)
        elif key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        else:
            values[key] = value

    base = _measure(values, pieces["piece"])
    has_star = pieces["star_piece"] or any(k.startswith("star_") for k in values)
    star = _measure(values, pieces["star_piece"], "star_", base) if has_star else None

    kwargs: dict = {"measure": base, "measure_star": star}
    try:
        for key, value in values.items():
            if key in MEASURE_KEYS or key.startswith("star_"):
                continue
            if key in SCALAR_FLOAT:
                kwargs[key] = float(value)
            elif key in SCALAR_INT:
                kwargs[key] = int(value)
            elif key == "rate_band":
                band = None if value.lower() == "none" else _floats(value)
                if band is not None and len(band) != 2:
                    raise ConfigError("rate_band needs two numbers or 'none'")
                kwargs[key] = band
            elif key in ("n_ladder", "inequality_n"):
                kwargs[key] = tuple(int(v) for v in value.split(",") if v.strip())
            elif key in LISTS:
                kwargs[key] = _floats(value)
            else:
                kwargs[key] = value
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value: {exc}") from exc
    return ExperimentConfig(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
