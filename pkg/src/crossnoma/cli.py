"""Command line interface.

Exit codes: 0 on success, 1 when the validate suite reports a failure,
2 on configuration problems, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .analytic import outage_o1, outage_o2, outage_oma
from .config import ScenarioConfig, load_config
from .errors import ConfigError, NumericalError
from .montecarlo import PROV_EXACT, PROV_MC, PROV_PAPER, estimate
from .sweeps import (
    COLUMNS,
    compare,
    figure_sweep_spec,
    parse_sweep_spec,
    run_sweep,
    write_csv,
    write_table,
)
from .validate import run_validation

POINT_COLUMNS = ("scheme", "event", "source", "probability", "std_err", "trials")
COMPARE_COLUMNS = (
    "scheme",
    "event",
    "analytic_paper",
    "analytic_exact",
    "mc_p_hat",
    "mc_std_err",
    "z_score_exact",
    "gap_paper_exact",
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="scenario file (flat key = value)")
    parser.add_argument("--trials", type=int, default=None, help="Monte Carlo trials (default 100000)")
    parser.add_argument("--seed", type=int, default=None, help="master seed (default 42)")
    parser.add_argument(
        "--kernel",
        choices=("paper", "exact", "both"),
        default=None,
        help="closed-form kernel variant (default exact)",
    )
    parser.add_argument(
        "--scheme", choices=("noma", "oma", "both"), default=None, help="access scheme"
    )
    parser.add_argument("--out", type=Path, default=None, help="CSV output path")
    parser.add_argument("--window", type=float, default=None, help="road half-width in meters")
    parser.add_argument("--workers", type=int, default=1, help="worker processes for trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossnoma",
        description="Outage of cooperative NOMA/OMA mmWave links at a road intersection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="closed-form outage for one scenario")
    _add_common(p)
    p = sub.add_parser("simulate", help="Monte Carlo outage estimate for one scenario")
    _add_common(p)
    p = sub.add_parser("compare", help="closed forms vs simulation with z-scores")
    _add_common(p)
    p = sub.add_parser("sweep", help="run a sweep protocol")
    _add_common(p)
    p.add_argument("--figure", type=int, choices=(2, 3, 4, 5), help="built-in sweep preset")
    p.add_argument("--spec", type=Path, help="explicit sweep spec file")
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p = sub.add_parser("validate", help="run the numeric self-check suite")
    _add_common(p)
    return parser


def _resolve_config(args) -> ScenarioConfig:
    cfg = load_config(args.config)
    if args.window is not None:
        cfg = replace(cfg, ppp=replace(cfg.ppp, window=args.window))
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("trials: must be >= 1")
        cfg = replace(cfg, trials=args.trials)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.kernel is not None:
        cfg = replace(cfg, kernel=args.kernel)
    if args.scheme is not None:
        cfg = replace(cfg, scheme=args.scheme)
    return cfg


def _schemes(cfg: ScenarioConfig) -> tuple[str, ...]:
    return ("noma", "oma") if cfg.scheme == "both" else (cfg.scheme,)


def _kernels(cfg: ScenarioConfig) -> tuple[str, ...]:
    return ("paper", "exact") if cfg.kernel == "both" else (cfg.kernel,)


def _analytic_rows(cfg: ScenarioConfig) -> list[dict]:
    rows = []
    for scheme in _schemes(cfg):
        for kernel in _kernels(cfg):
            source = PROV_PAPER if kernel == "paper" else PROV_EXACT
            if scheme == "noma":
                pair = (outage_o1(cfg, kernel), outage_o2(cfg, kernel))
            else:
                pair = (outage_oma(cfg, "D1", kernel), outage_oma(cfg, "D2", kernel))
            for event, prob in zip(("d1", "d2"), pair):
                rows.append(
                    {
                        "scheme": scheme,
                        "event": event,
                        "source": source,
                        "probability": prob,
                        "std_err": 0.0,
                        "trials": 0,
                    }
                )
    return rows


def _cmd_analytic(args) -> int:
    cfg = _resolve_config(args)
    rows = _analytic_rows(cfg)
    for row in rows:
        print(
            f"{row['scheme']:4s} {row['event']}  {row['source']:15s} "
            f"outage = {row['probability']:.6g}"
        )
    if args.out:
        write_csv(rows, args.out, cfg, POINT_COLUMNS)
        print(f"wrote {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    rows = []
    for scheme in _schemes(cfg):
        first, second = estimate(cfg, scheme, workers=args.workers)
        for event, est in zip(("d1", "d2"), (first, second)):
            print(
                f"{scheme:4s} {event}  monte-carlo     outage = {est.p_hat:.6g} "
                f"+/- {est.std_err:.2g}  ({est.trials} trials, seed {est.seed})"
            )
            rows.append(
                {
                    "scheme": scheme,
                    "event": event,
                    "source": PROV_MC,
                    "probability": est.p_hat,
                    "std_err": est.std_err,
                    "trials": est.trials,
                }
            )
    if args.out:
        write_csv(rows, args.out, cfg, POINT_COLUMNS)
        print(f"wrote {args.out}")
    return 0


def _cmd_compare(args) -> int:
    cfg = _resolve_config(args)
    records = compare(cfg, workers=args.workers)
    rows = []
    for rec in records:
        print(
            f"{rec.scheme:4s} {rec.event}  paper={rec.analytic_paper:.6g} "
            f"exact={rec.analytic_exact:.6g} mc={rec.mc_p_hat:.6g}"
            f" +/- {rec.mc_std_err:.2g}  z(exact)={rec.z_score_exact:+.2f}"
            f"  gap(paper-exact)={rec.gap_paper_exact:+.3g}"
        )
        rows.append(
            {
                "scheme": rec.scheme,
                "event": rec.event,
                "analytic_paper": rec.analytic_paper,
                "analytic_exact": rec.analytic_exact,
                "mc_p_hat": rec.mc_p_hat,
                "mc_std_err": rec.mc_std_err,
                "z_score_exact": rec.z_score_exact,
                "gap_paper_exact": rec.gap_paper_exact,
            }
        )
    if args.out:
        write_csv(rows, args.out, cfg, COMPARE_COLUMNS)
        print(f"wrote {args.out}")
    return 0


def _sweep_sources(cfg: ScenarioConfig) -> tuple[str, ...]:
    mapping = {"paper": (PROV_PAPER,), "exact": (PROV_EXACT,), "both": (PROV_PAPER, PROV_EXACT)}
    return mapping[cfg.kernel] + (PROV_MC,)


def _cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    if (args.figure is None) == (args.spec is None):
        raise ConfigError("sweep needs exactly one of --figure or --spec")
    if args.figure is not None:
        spec = figure_sweep_spec(args.figure, cfg, sources=_sweep_sources(cfg))
        default_name = f"fig{args.figure}_sweep.csv"
    else:
        spec = parse_sweep_spec(Path(args.spec).read_text(encoding="utf-8"), cfg)
        default_name = "sweep.csv"
    if args.scheme is not None:
        spec = replace(spec, schemes=_schemes(cfg))
    out = args.out or Path(default_name)

    rows = run_sweep(spec, trials=cfg.trials, master_seed=cfg.master_seed, workers=args.workers)
    extras = [
        ("sweep_variable", spec.variable),
        ("sweep_grid", ", ".join(f"{v}" for v in spec.grid)),
        ("sweep_schemes", ", ".join(spec.schemes)),
        ("sweep_scenarios", ", ".join(spec.scenarios)),
        ("sweep_sources", ", ".join(spec.sources)),
    ]
    write_table(rows, out, spec.base, extras)
    print(f"wrote {out} ({len(rows)} rows)")
    if not args.no_plot:
        from .plotting import render_sweep_plot

        png = Path(out).with_suffix(".png")
        render_sweep_plot(rows, png)
        print(f"wrote {png}")
    return 0


def _cmd_validate(args) -> int:
    _resolve_config(args)  # surface config problems with exit code 2
    return 0 if run_validation() else 1


_COMMANDS = {
    "analytic": _cmd_analytic,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def run() -> None:  # console entry point
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
