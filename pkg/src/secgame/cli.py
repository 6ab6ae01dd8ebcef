"""Command-line entry point: ``secgame solve|verify|sweep|regions``.

Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 failed verification.
"""
from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager
from typing import Iterator, TextIO

import numpy as np

from . import __version__
from .io import dumps, equilibrium_from_dict, read_json, write_csv
from .linear import enumerate_boundary_nes
from .model import Equilibrium, InfeasibleSpec, ModelKind, SecGameError
from .oracle import EPS_REL, epsilon_nash_check, random_deviation_check
from .product import kkt_residual
from .regions import RegionBoundaryTable, region_boundaries
from .solve import SweepRequest, run_sweep, solve
from .validation import check_grid, check_spec

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

log = logging.getLogger("secgame")


class _InputError(Exception):
    pass


@contextmanager
def _output(path: str | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _load_spec(path: str, probability_cap: bool):
    try:
        return check_spec(read_json(path), probability_cap=probability_cap)
    except InfeasibleSpec:
        raise
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise _InputError(f"cannot read spec {path}: {exc}") from exc


def _summary(eq: Equilibrium) -> str:
    fmt = lambda v: np.array2string(np.asarray(v), precision=6, separator=", ")  # noqa: E731
    lines = [
        f"domain {eq.budget_domain.value}  K_A={eq.k_attacker}  K_D={eq.k_defender}",
        f"x* = {fmt(eq.x)}",
        f"y* = {fmt(eq.y)}",
        f"lambda = {eq.lam:.6g}  rho = {eq.rho:.6g}",
        f"U_A = {eq.utility_attacker:.6g}  U_D = {eq.utility_defender:.6g}",
        f"multiplicity {eq.multiplicity.value}",
    ]
    if eq.free_interval is not None:
        lines.append(f"free parameter interval [{eq.free_interval[0]:.6g}, {eq.free_interval[1]:.6g}]")
    return "\n".join(lines) + "\n"


def cmd_solve(args: argparse.Namespace) -> int:
    cap = not args.no_probability_cap
    spec = _load_spec(args.spec, cap)
    eq, fam = solve(spec, tol=args.tol, method=args.method, probability_cap=cap)
    report = {
        "spec": spec.to_dict(),
        "equilibrium": eq.to_dict(),
        "kkt_residual": kkt_residual(spec, eq),
        "seed": args.seed,
        "tol": args.tol,
    }
    if fam is not None:
        report["family"] = {"kind": fam.kind.value, "case": fam.case, "k": fam.k,
                            "free_interval": None if fam.free_interval is None else list(fam.free_interval)}
        if args.samples and fam.free_interval is not None:
            report["boundary_samples"] = [e.to_dict() for e in enumerate_boundary_nes(fam, args.samples)]
    text = dumps(report)
    if args.out:
        with _output(args.out) as fh:
            fh.write(text)
        sys.stdout.write(_summary(eq))
    else:
        sys.stdout.write(text)
        sys.stderr.write(_summary(eq))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    cap = not args.no_probability_cap
    spec = _load_spec(args.spec, cap)
    try:
        eq = equilibrium_from_dict(spec, read_json(args.eq))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise _InputError(f"cannot read equilibrium {args.eq}: {exc}") from exc
    if eq.x.shape != (spec.n,):
        raise _InputError(f"equilibrium has {eq.x.size} targets, spec has {spec.n}")
    report = epsilon_nash_check(spec, eq, eps_rel=args.tol)
    rng = np.random.default_rng(args.seed)
    report.invariant_results.append(random_deviation_check(spec, eq, rng, args.samples or 50, args.tol))
    out = report.to_dict()
    out["seed"] = args.seed
    with _output(args.out) as fh:
        fh.write(dumps(out))
    if not report.passed:
        sys.stderr.write("verification failed: " + ", ".join(report.failures) + "\n")
        return EXIT_VERIFY
    return EXIT_OK


def _write_regions(fh: TextIO, spec, lams: np.ndarray, targets) -> None:
    cols = ["target"] + list(RegionBoundaryTable.columns)
    rows = []
    for i in targets:
        tab = region_boundaries(i, spec, lams)
        rows += [[i + 1, *row] for row in tab.rows()]
    write_csv(fh, cols, rows)


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        req = SweepRequest.from_dict(read_json(args.request))
    except InfeasibleSpec:
        raise
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise _InputError(f"cannot read sweep request {args.request}: {exc}") from exc
    if args.regions:
        if req.spec.model is not ModelKind.PRODUCT:
            raise _InputError("regions are defined for ProductForm specs only")
        with _output(args.out) as fh:
            _write_regions(fh, req.spec, check_grid(*req.range), range(req.spec.n))
        return EXIT_OK
    cols, rows = run_sweep(req, tol=args.tol)
    with _output(args.out) as fh:
        write_csv(fh, cols, rows)
    return EXIT_OK


def cmd_regions(args: argparse.Namespace) -> int:
    spec = _load_spec(args.spec, True)
    if spec.model is not ModelKind.PRODUCT:
        raise _InputError("regions are defined for ProductForm specs only")
    lo, hi, steps = args.lambda_range
    try:
        lams = check_grid(float(lo), float(hi), int(steps))
    except ValueError as exc:
        raise _InputError(str(exc)) from exc
    if args.target is not None and not 1 <= args.target <= spec.n:
        raise _InputError(f"target must lie in 1..{spec.n}")
    targets = range(spec.n) if args.target is None else [args.target - 1]
    with _output(args.out) as fh:
        _write_regions(fh, spec, lams, targets)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised checks (default 0)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="secgame", description="Nash equilibria of attacker/defender allocation games.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="solve a GameSpec JSON file")
    s.add_argument("--spec", required=True)
    s.add_argument("--tol", type=float, default=1e-6, help="KKT acceptance tolerance")
    s.add_argument("--samples", type=int, default=0, help="members to list for a boundary family")
    s.add_argument("--method", choices=["auto", "numeric"], default="auto")
    s.add_argument("--no-probability-cap", action="store_true", help="allow LinearMatrix budgets above 1")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="certify an equilibrium file")
    v.add_argument("--spec", required=True)
    v.add_argument("--eq", required=True)
    v.add_argument("--tol", type=float, default=EPS_REL, help="relative epsilon for best-response gains")
    v.add_argument("--samples", type=int, default=50, help="random deviations per player")
    v.add_argument("--no-probability-cap", action="store_true")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("sweep", parents=[common], help="sweep budgets and write CSV")
    w.add_argument("--request", required=True)
    w.add_argument("--tol", type=float, default=1e-6)
    w.add_argument("--regions", action="store_true", help="emit region boundaries over the request range instead")
    w.set_defaults(func=cmd_sweep)

    r = sub.add_parser("regions", parents=[common], help="region boundary table (ProductForm)")
    r.add_argument("--spec", required=True)
    r.add_argument("--target", type=int, help="1-based target index (default: all)")
    r.add_argument("--lambda-range", nargs=3, metavar=("LO", "HI", "STEPS"), default=("0", "1", "11"))
    r.set_defaults(func=cmd_regions)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InfeasibleSpec as exc:
        sys.stderr.write("invalid spec: " + "; ".join(exc.violations) + "\n")
        return EXIT_INVALID
    except _InputError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_INVALID
    except (SecGameError, ValueError) as exc:
        sys.stderr.write(f"solver failure: {type(exc).__name__}: {exc}\n")
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
