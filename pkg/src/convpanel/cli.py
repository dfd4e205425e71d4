"""Command-line front end.

Subcommands: ``fit`` (convergence regressions on a CSV panel),
``sigma`` (per-year log-productivity dispersion), ``lq`` (location
quotients), ``simulate`` (write a synthetic panel as CSV) and
``recover`` (Monte Carlo estimator validation). Exit codes: 0 success,
1 usage error, 2 data error, 3 estimation error. All randomness takes
an explicit --seed; identical invocations print identical bytes.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .convergence import run_convergence
from .errors import EstimationError, PanelDataError
from .estimators import METHODS, ModelSpec
from .io_report import (
    FORMATS,
    location_quotients_from_rows,
    panel_from_rows,
    read_rows,
    render_location_quotients,
    render_panel_csv,
    render_recovery,
    render_report,
    render_sigma,
    write_panel,
)
from .montecarlo import SimulationConfig, recovery_experiment, simulate_panel
from .panel import sigma_dispersion

CONDITIONAL_ALIASES = {
    "capital_output": "capital_output_ratio",
    "capital_output_ratio": "capital_output_ratio",
    "goods_flow": "goods_flow_output_ratio",
    "goods_flow_output_ratio": "goods_flow_output_ratio",
    "location_quotient": "location_quotient",
}


class _Parser(argparse.ArgumentParser):
    """argparse with the package's usage exit code (1, not argparse's 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_io_flags(parser, with_window=True):
    parser.add_argument("--input", required=True, help="long-format panel CSV")
    parser.add_argument("--sector", required=True, help="sector label to select")
    if with_window:
        parser.add_argument("--from", dest="from_year", type=int, help="first year (inclusive)")
        parser.add_argument("--to", dest="to_year", type=int, help="last year (inclusive)")


def _add_output_flags(parser):
    parser.add_argument("--format", choices=FORMATS, default="md")
    parser.add_argument("--out", help="write output here instead of stdout")


def _add_dgp_flags(parser):
    parser.add_argument("--seed", type=int, required=True, help="RNG seed (required)")
    parser.add_argument("--regions", type=int, default=5)
    parser.add_argument("--periods", type=int, default=9)
    parser.add_argument("--b-true", dest="b_true", type=float, default=-0.3)
    parser.add_argument("--intercept", type=float, default=0.0)
    parser.add_argument(
        "--effect-sd",
        dest="effect_sd",
        type=float,
        default=0.0,
        help="standard deviation of random region effects (0 = equal effects)",
    )
    parser.add_argument("--noise-sd", dest="noise_sd", type=float, default=0.05)
    parser.add_argument(
        "--initial-sd",
        dest="initial_sd",
        type=float,
        default=1.5,
        help="dispersion of initial log productivity",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="convpanel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="estimate convergence regressions")
    _add_io_flags(fit)
    fit.add_argument("--method", choices=METHODS + ("all",), default="all")
    fit.add_argument(
        "--conditional",
        default="",
        help="comma-separated structural regressors "
        "(capital_output, goods_flow, location_quotient)",
    )
    _add_output_flags(fit)

    sigma = sub.add_parser("sigma", help="per-year dispersion of log productivity")
    _add_io_flags(sigma)
    _add_output_flags(sigma)

    lq = sub.add_parser("lq", help="location quotients from employment data")
    _add_io_flags(lq)
    _add_output_flags(lq)

    simulate = sub.add_parser("simulate", help="write a synthetic panel as CSV")
    _add_dgp_flags(simulate)
    simulate.add_argument("--out", help="write CSV here instead of stdout")

    recover = sub.add_parser("recover", help="Monte Carlo estimator recovery")
    _add_dgp_flags(recover)
    recover.add_argument("--reps", type=int, default=500)
    recover.add_argument(
        "--methods",
        default="all",
        help="comma-separated subset of pooled,lsdv,gls (default all)",
    )
    _add_output_flags(recover)
    return parser


def _conditional_names(raw: str) -> tuple[str, ...]:
    names = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        if token not in CONDITIONAL_ALIASES:
            raise PanelDataError(
                f"unknown structural regressor {token!r}; "
                f"expected one of {sorted(set(CONDITIONAL_ALIASES))}"
            )
        names.append(CONDITIONAL_ALIASES[token])
    if len(set(names)) != len(names):
        raise PanelDataError("structural regressors must be unique")
    return tuple(names)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _simulation_config(args) -> SimulationConfig:
    return SimulationConfig(
        seed=args.seed,
        regions=args.regions,
        periods=args.periods,
        b_true=args.b_true,
        intercept=args.intercept,
        region_effects=args.effect_sd**2,
        noise_sd=args.noise_sd,
        initial_dispersion=args.initial_sd,
    )


def _cmd_fit(args) -> None:
    structural = _conditional_names(args.conditional)
    rows = read_rows(args.input)
    if "location_quotient" in structural:
        panel = location_quotients_from_rows(rows, args.sector, args.from_year, args.to_year)
    else:
        panel = panel_from_rows(rows, args.sector, args.from_year, args.to_year)
    methods = METHODS if args.method == "all" else (args.method,)
    reports = [
        run_convergence(panel, ModelSpec(method=method, structural=structural))
        for method in methods
    ]
    _emit(render_report(reports, args.format), args.out)


def _cmd_sigma(args) -> None:
    rows = read_rows(args.input)
    panel = panel_from_rows(rows, args.sector, args.from_year, args.to_year)
    _emit(render_sigma(sigma_dispersion(panel), args.format), args.out)


def _cmd_lq(args) -> None:
    rows = read_rows(args.input)
    panel = location_quotients_from_rows(rows, args.sector, args.from_year, args.to_year)
    _emit(render_location_quotients(panel, args.format), args.out)


def _cmd_simulate(args) -> None:
    panel = simulate_panel(_simulation_config(args))
    if args.out:
        write_panel(panel, args.out)
    else:
        sys.stdout.write(render_panel_csv(panel))


def _cmd_recover(args) -> None:
    methods = METHODS if args.methods == "all" else tuple(m.strip() for m in args.methods.split(","))
    for method in methods:
        if method not in METHODS:
            raise PanelDataError(f"unknown method {method!r}; expected subset of {METHODS}")
    stats = recovery_experiment(_simulation_config(args), args.reps, methods)
    _emit(render_recovery(stats, args.format), args.out)


_COMMANDS = {
    "fit": _cmd_fit,
    "sigma": _cmd_sigma,
    "lq": _cmd_lq,
    "simulate": _cmd_simulate,
    "recover": _cmd_recover,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except PanelDataError as error:
        print(f"convpanel: data error: {error}", file=sys.stderr)
        return 2
    except EstimationError as error:
        print(f"convpanel: estimation error: {error}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
