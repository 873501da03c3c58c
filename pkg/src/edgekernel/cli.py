"""Command-line entry point: ``edgekernel <subcommand> --config <path> [--out <path>]``.

Exit status is 0 on success, 2 when an experiment's assertions fail and
1 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

from .config import ConfigError, ExperimentConfig, load_config
from .experiments import EXPERIMENTS
from .kernels import KernelEvaluator
from .measure import InvalidSpecError, require_valid
from .quadrature import QuadratureError
from .special import bessel_j, bessel_j_prime, bessel_kernel

log = logging.getLogger("edgekernel")

EXIT_OK, EXIT_IO, EXIT_ASSERT = 0, 1, 2


def format_15(value: float) -> str:
    """Plain positional decimal with 15 significant digits."""
    if not math.isfinite(value):
        return repr(value)
    if value == 0:
        return "0." + "0" * 14
    d = Decimal(value)
    q = d.quantize(Decimal(1).scaleb(d.adjusted() - 14), rounding=ROUND_HALF_EVEN)
    if q.adjusted() > d.adjusted():
        # rounding carried into a new leading digit
        q = q.quantize(Decimal(1).scaleb(q.adjusted() - 14), rounding=ROUND_HALF_EVEN)
    return format(q, "f")


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _out_path(args, cfg: ExperimentConfig | None) -> Path | None:
    if args.out:
        return Path(args.out)
    if cfg is not None and cfg.output:
        return Path(cfg.output)
    return None


def _need(value, name: str):
    if value is None:
        raise ConfigError(f"config key {name!r} is required for this subcommand")
    return value


def _evaluator(cfg: ExperimentConfig, n: int) -> KernelEvaluator:
    require_valid(cfg.measure)
    return KernelEvaluator.for_spec(cfg.measure, n, cfg.n_per_panel)


def cmd_recurrence(args, cfg: ExperimentConfig) -> int:
    n_max = cfg.n if cfg.n is not None else max(cfg.n_ladder)
    table = _evaluator(cfg, n_max).table
    lines = [f"# mass={table.mass!r}", "n,a_n,b_n", f"0,,{float(table.b[0])!r}"]
    for n in range(1, n_max + 1):
        b = repr(float(table.b[n])) if n < len(table.b) else ""
        lines.append(f"{n},{float(table.a[n - 1])!r},{b}")
    _emit("\n".join(lines) + "\n", _out_path(args, cfg))
    return EXIT_OK


def cmd_kernel(args, cfg: ExperimentConfig) -> int:
    n = _need(cfg.n, "n")
    x = _need(cfg.x, "x")
    y = cfg.y if cfg.y is not None else x
    value = _evaluator(cfg, n).kernel(n, x, y)
    _emit(f"{value!r}\n", _out_path(args, cfg))
    return EXIT_OK


def cmd_christoffel(args, cfg: ExperimentConfig) -> int:
    n = _need(cfg.n, "n")
    xs = _need(cfg.x_grid, "x_grid")
    ev = _evaluator(cfg, n)
    lines = ["x,lambda_n"] + [f"{x!r},{ev.christoffel(n, x)!r}" for x in xs]
    _emit("\n".join(lines) + "\n", _out_path(args, cfg))
    return EXIT_OK


def cmd_bessel(args, cfg: ExperimentConfig | None) -> int:
    alpha = args.alpha if args.alpha is not None else (cfg.measure.alpha if cfg else 0.0)
    if args.function == "kernel":
        if args.u is None or args.v is None:
            raise ConfigError("bessel kernel needs --u and --v")
        value = bessel_kernel(alpha, args.u, args.v)
    else:
        if args.z is None:
            raise ConfigError(f"bessel {args.function} needs --z")
        fn = bessel_j if args.function == "j" else bessel_j_prime
        value = fn(alpha, args.z)
    _emit(format_15(value) + "\n", _out_path(args, cfg))
    return EXIT_OK


def cmd_experiment(args, cfg: ExperimentConfig) -> int:
    report = EXPERIMENTS[args.name](cfg)
    out = _out_path(args, cfg)
    if out is None:
        sys.stdout.write(report.to_csv())
        sys.stderr.write(report.to_json() + "\n")
    else:
        out.write_text(report.to_csv(), encoding="utf-8")
        out.with_suffix(".json").write_text(report.to_json() + "\n", encoding="utf-8")
    for key, ok in report.checks.items():
        if not ok:
            log.warning("%s: check %s failed", report.experiment, key)
    return EXIT_OK if report.passed else EXIT_ASSERT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgekernel", description="Orthogonal-polynomial kernels near a hard edge.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="key = value config file")
        p.add_argument("--out", help="output path (CSV; experiments also write a .json sibling)")
        return p

    common(sub.add_parser("recurrence", help="recurrence coefficients as CSV"))
    common(sub.add_parser("kernel", help="K_n(x, y) for config keys n, x, y"))
    common(sub.add_parser("christoffel", help="lambda_n over config key x_grid"))
    b = common(sub.add_parser("bessel", help="J, J' or the Bessel kernel"), config_required=False)
    b.add_argument("function", choices=("j", "jprime", "kernel"))
    b.add_argument("--alpha", type=float)
    b.add_argument("--z", type=float)
    b.add_argument("--u", type=float)
    b.add_argument("--v", type=float)
    e = common(sub.add_parser("experiment", help="run a convergence experiment"))
    e.add_argument("name", choices=sorted(EXPERIMENTS))
    return parser


COMMANDS = {
    "recurrence": cmd_recurrence,
    "kernel": cmd_kernel,
    "christoffel": cmd_christoffel,
    "bessel": cmd_bessel,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else None
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, InvalidSpecError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (ValueError, QuadratureError, ArithmeticError) as exc:
        log.error("evaluation failed: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
