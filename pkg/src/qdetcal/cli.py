"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 numerical failure.
The number of worker threads for grid evaluation comes from ``QDETCAL_THREADS``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, montecarlo
from .analysis import CurveSpec, fixed_energy_sweep
from .config import SweepSpec, parse_detector, parse_eta_grid, parse_probe
from .core import Homodyne, check_eta
from .errors import BracketError, ConvergenceFailure, DomainError, EnergyMismatch, NoThreshold
from .export import curves_to_csv, curves_to_json

EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _render(curves, fmt: str) -> str:
    return curves_to_json(curves) if fmt == "json" else curves_to_csv(curves)


def cmd_fisher(args) -> int:
    detector = parse_detector(args.detector, args.delta)
    probe = parse_probe(args.probe)
    if args.eta_grid is not None:
        curves = fixed_energy_sweep([CurveSpec(probe, detector, 1)], parse_eta_grid(args.eta_grid), check_energy=False)
        _emit(_render(curves, args.format), args.out)
        return 0
    if args.eta is None:
        raise DomainError("give --eta or --eta-grid")
    result = analysis.fisher_information(probe, detector, check_eta(args.eta))
    _emit(_dump(result.to_dict()), args.out)
    return 0


def cmd_figure(args) -> int:
    curves = analysis.figure_sweep(args.figure_id)
    _emit(_render(curves, args.format), args.out)
    return 0


def cmd_sweep(args) -> int:
    spec = SweepSpec.load(args.spec)
    curves = fixed_energy_sweep(spec.curves, spec.eta_grid, check_energy=spec.check_energy)
    out = args.out if args.out is not None else (str(spec.out) if spec.out is not None else None)
    _emit(_render(curves, args.format or spec.format), out)
    return 0


def _bracket(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    try:
        return float(lo), float(hi)
    except ValueError:
        raise DomainError(f"bracket {text!r} must be LO:HI") from None


def cmd_crossover(args) -> int:
    detector = parse_detector(args.detector, args.delta)
    a = CurveSpec(parse_probe(args.a), detector, args.a_reps)
    b = CurveSpec(parse_probe(args.b), detector, args.b_reps)
    res = analysis.find_crossover(a, b, _bracket(args.bracket))
    doc = {
        "curve_a": a.name,
        "curve_b": b.name,
        "detector": detector.label(),
        "eta_star": res.eta_star,
        "bracket": list(res.bracket),
        "residual": res.residual,
        "sign_changes": res.sign_changes,
    }
    _emit(_dump(doc), args.out)
    return 0


def cmd_threshold(args) -> int:
    detector = parse_detector(args.detector, args.delta)
    reference = parse_probe(args.reference)
    doc = {"detector": detector.label(), "reference": reference.label()}
    if isinstance(detector, Homodyne):
        sens = analysis.threshold_sensitivity(detector, reference, args.eta, args.eta_alt)
        doc.update(
            xi_star=sens.xi_star,
            eta_eval=sens.eta_eval,
            sensitivity={"eta_alt": sens.eta_alt, "xi_star_alt": sens.xi_star_alt, "shift": sens.shift},
        )
    else:
        eta = analysis.default_threshold_eta(detector) if args.eta is None else args.eta
        doc.update(xi_star=analysis.heralding_threshold(detector, reference, eta), eta_eval=eta)
    _emit(_dump(doc), args.out)
    return 0


def cmd_simulate(args) -> int:
    run = montecarlo.EstimationRun(
        parse_probe(args.probe),
        parse_detector(args.detector, args.delta),
        args.eta,
        args.trials,
        args.seed,
        args.replicates,
    )
    result = montecarlo.validate_crb(run)
    doc = result.to_dict()
    doc.update(
        probe=run.probe.label(), detector=run.detector.label(), delta=run.delta, eta_true=run.eta_true, trials=run.trials
    )
    if args.no_estimates:
        del doc["estimates"]
    _emit(_dump(doc), args.out)
    return 0


def _add_common(p: argparse.ArgumentParser, probe: bool = True) -> None:
    p.add_argument("--detector", default="onoff", help="onoff | koutcome:K | homodyne")
    p.add_argument("--delta", type=float, default=0.0, help="dark-count exponent (on/off only)")
    if probe:
        p.add_argument("--probe", required=True, help="fock:N | coherent:NBAR | heralded:XI | mixture:FILE")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdetcal", description="Fisher information for detector-efficiency calibration")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fisher", help="Fisher information of one probe/detector pair")
    _add_common(p)
    p.add_argument("--eta", type=float)
    p.add_argument("--eta-grid", help="START:STOP:COUNT")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="format for --eta-grid output")
    p.set_defaults(func=cmd_fisher)

    p = sub.add_parser("figure", help="reproduce the data behind a comparison figure")
    p.add_argument("figure_id", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("sweep", help="run a sweep described by a JSON config file")
    p.add_argument("spec")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("crossover", help="efficiency where two curves cross")
    _add_common(p, probe=False)
    p.add_argument("--a", required=True, help="probe for curve A")
    p.add_argument("--a-reps", type=int, default=1)
    p.add_argument("--b", required=True, help="probe for curve B")
    p.add_argument("--b-reps", type=int, default=1)
    p.add_argument("--bracket", default="0.01:0.99", help="LO:HI")
    p.set_defaults(func=cmd_crossover)

    p = sub.add_parser("threshold", help="heralding efficiency needed to match a reference probe")
    _add_common(p, probe=False)
    p.add_argument("--reference", default="coherent:1")
    p.add_argument("--eta", type=float, default=None, help="evaluation efficiency")
    p.add_argument("--eta-alt", type=float, default=1.0 - 1e-3, help="second point for the homodyne sensitivity report")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("simulate", help="Monte Carlo MLE campaign against the Cramer-Rao bound")
    _add_common(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--replicates", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-estimates", action="store_true", help="omit per-replicate estimates")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, EnergyMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConvergenceFailure, BracketError, NoThreshold) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
