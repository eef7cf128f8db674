"""``carnot`` command-line entry point.

Exit codes: 0 success, 1 I/O or runtime failure, 2 invalid algebra file,
3 algebra outside the supported range (capacity or step).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Sequence

from . import __version__
from .algebra import BUILTIN_NAMES, CarnotAlgebra, builtin, hausdorff_dimension, load
from .bounds import holder_report, search_all_k
from .cohomology import compute_cohomology, verify_duality
from .errors import CapacityError, CarnotError, ConvergenceError, SpecError, StepUnsupported, ValidationError
from .exterior import FormSpace, ce_differential
from .isotropic import (cross_check_weight_vanishing, dimension_check, search_regular_isotropic,
                        theta_data)
from .rumin import build_rumin, verify_rumin_identities

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_UNSUPPORTED = 0, 1, 2, 3


def read_algebra(source: str) -> CarnotAlgebra:
    """Load a JSON file, or ``builtin:NAME[:m]`` for a named algebra."""
    if source.startswith("builtin:"):
        parts = source.split(":")
        if parts[1] not in BUILTIN_NAMES or len(parts) > 3:
            raise SpecError(f"unknown builtin {source!r}; names: {', '.join(BUILTIN_NAMES)}")
        try:
            m = int(parts[2]) if len(parts) == 3 else None
            return builtin(parts[1], m)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
    with open(source, encoding="utf-8") as fh:
        text = fh.read()
    return load(text)


def _emit_json(payload) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


def _emit_csv(rows) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["parameter", "estimate", "stderr"])
    writer.writerows(rows)


def cmd_validate(alg: CarnotAlgebra, args) -> int:
    payload = {"ok": True, "name": alg.name, "n": alg.n, "r": alg.step,
               "strata": list(alg.strata_dims), "Q": hausdorff_dimension(alg)}
    if args.json:
        _emit_json(payload)
    else:
        print(f"ok: {alg.name} (n={alg.n}, r={alg.step}, Q={payload['Q']})")
    return EXIT_OK


def cmd_info(alg: CarnotAlgebra, args) -> int:
    space = FormSpace(alg)
    forms = {f"{q},{w}": d for (q, w), d in space.dims_table().items()}
    payload = {"name": alg.name, "n": alg.n, "r": alg.step, "strata": list(alg.strata_dims),
               "Q": hausdorff_dimension(alg), "labels": list(alg.labels), "forms": forms}
    if args.json:
        _emit_json(payload)
        return EXIT_OK
    print(f"name:   {alg.name}")
    print(f"n:      {alg.n}")
    print(f"r:      {alg.step}")
    print(f"strata: {' '.join(map(str, alg.strata_dims))}")
    print(f"Q:      {payload['Q']}")
    print("dim Lambda^{q,w}:")
    for q in range(alg.n + 1):
        cells = "  ".join(f"w={w}:{space.dim(q, w)}" for w in space.weights(q))
        print(f"  q={q}: {cells}")
    return EXIT_OK


def cmd_cohomology(alg: CarnotAlgebra, args) -> int:
    table = compute_cohomology(alg)
    if args.json:
        _emit_json(table.to_json())
        return EXIT_OK
    print(f"H^{{q,w}} of {alg.name} (n={alg.n}, Q={table.Q}); nonzero blocks:")
    for q in range(alg.n + 1):
        cells = "  ".join(f"w={w}:{table.dim(q, w)}" for w in table.weights(q))
        print(f"  q={q}: {cells}")
    print(f"betti: {' '.join(map(str, table.betti))}")
    report = verify_duality(table, alg)
    print(f"duality H^{{q,w}} = H^{{n-q,Q-w}}: {'ok' if report.ok else 'MISMATCH'}")
    return EXIT_OK


def cmd_rumin(alg: CarnotAlgebra, args) -> int:
    data = build_rumin(alg)
    report = verify_rumin_identities(data)
    payload = {**data.summary(), **report.to_json()}
    if args.json:
        _emit_json(payload)
        return EXIT_OK
    print(f"Rumin decomposition of {alg.name}")
    for key in ("E", "im_d0", "F"):
        print(f"  dim {key:<5} by degree: {' '.join(map(str, payload[key]))}")
    print(f"  retraction stationary after {data.iterations} iteration(s)")
    for name, ok in report.checks.items():
        print(f"  {'pass' if ok else 'FAIL'}  {name}")
    return EXIT_OK if report.ok else EXIT_IO


def cmd_isotropic(alg: CarnotAlgebra, args) -> int:
    theta = theta_data(alg)
    result = search_regular_isotropic(theta, args.k, args.trials, args.seed, step=alg.step)
    payload = {"k": args.k, "h": alg.h, "n": alg.n,
               "dimension_check": dimension_check(alg.h, alg.n, args.k), **result.to_json()}
    if result.found:
        check = cross_check_weight_vanishing(alg, result.plane)
        payload["weight_vanishing_ok"] = check.ok
        payload["weight_vanishing_violations"] = [list(v) for v in check.violations]
    if args.json:
        _emit_json(payload)
        return EXIT_OK
    print(f"seed: {args.seed}")
    print(f"k={args.k}, h={alg.h}, n={alg.n}: dimension condition h-k >= (n-h)k is "
          f"{payload['dimension_check']}")
    if result.found:
        print(f"found regular isotropic plane after {result.trials} trial(s):")
        for v in result.plane.basis:
            print("  (" + ", ".join(str(x) for x in v) + ")")
        print(f"weight vanishing cross-check: {'ok' if payload['weight_vanishing_ok'] else 'VIOLATED'}")
    else:
        print(f"no regular isotropic {args.k}-plane in {result.trials} trial(s)")
    if result.invariant_level_only:
        print("note: step >= 3, verdict concerns the left-invariant (d0) level only")
    return EXIT_OK


def cmd_bounds(alg: CarnotAlgebra, args) -> int:
    table = compute_cohomology(alg)
    searches = [] if args.no_richness else search_all_k(alg, args.trials, args.seed)
    report = holder_report(alg, table, searches)
    payload = report.to_json()
    payload["seed"] = args.seed
    if args.json:
        _emit_json(payload)
        return EXIT_OK
    print(f"seed: {args.seed}")
    print(f"{alg.name}: n={report.n}, Q={report.Q}, r={report.r}")
    print(f"lower bound: {payload['lower']}  ({payload['lower_cite']})")
    print("upper bounds:")
    for u in payload["uppers"]:
        tag = u["rule"] + (f"(q={u['q']})" if "q" in u else "") + (f"(k={u['k']})" if "k" in u else "")
        print(f"  {u['value']:>7}  {tag:<14} {u['cite']}")
    print(f"best upper bound: {payload['best_upper']}")
    w = ", ".join(f"W_{q}>={v}" for q, v in payload["W_alg"].items() if v is not None)
    print(f"weight certificates: {w}")
    return EXIT_OK


def cmd_lab(alg: CarnotAlgebra, args) -> int:
    from .lab.ccdist import optimize_path
    from .lab.montecarlo import tube_experiment, volume_scaling_experiment

    if args.experiment == "volume":
        eps = args.eps or [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
        res = volume_scaling_experiment(alg, eps, args.samples, args.seed)
        rows = res.rows() + [("slope", res.slope, res.slope_stderr)]
        payload = {**res.to_json(), "Q": hausdorff_dimension(alg)}
    elif args.experiment == "tube":
        eps = args.eps or [0.05, 0.1, 0.2]
        results = [tube_experiment(alg, e, args.tau, args.samples, args.seed) for e in eps]
        rows = [(r.eps, r.ratio, r.ratio_stderr) for r in results]
        payload = {"tau": args.tau, "experiments": [r.to_json() for r in results]}
    else:
        target = args.target or [0.0, 0.0, 1.0]
        res = optimize_path(alg, target, args.segments, args.restarts, args.seed)
        rows = [(" ".join(repr(float(t)) for t in target), res.length, "")]
        payload = {"target": [float(t) for t in target], "length": res.length,
                   "violation": res.violation, "segments": args.segments,
                   "restarts": args.restarts, "seed": args.seed}
    if args.json:
        payload.setdefault("seed", args.seed)
        _emit_json(payload)
    elif args.csv:
        _emit_csv(rows)
    else:
        print(f"seed: {args.seed}")
        for p, est, err in rows:
            print(f"{p!s:>12}  {est!r}  {err!r}" if err != "" else f"{p!s:>12}  {est!r}")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate, "info": cmd_info, "cohomology": cmd_cohomology,
    "rumin": cmd_rumin, "isotropic": cmd_isotropic, "bounds": cmd_bounds, "lab": cmd_lab,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carnot", description="Cohomology, Rumin complex and Hoelder exponent bounds "
                                   "for Carnot Lie algebras.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="algebra JSON file, or builtin:NAME[:m]")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    add("validate", "check an algebra file")
    add("info", "dimensions, weights and form spaces")
    add("cohomology", "bigraded Lie algebra cohomology")
    add("rumin", "algebraic Rumin decomposition and identity checks")
    p = add("isotropic", "search for regular isotropic horizontal k-planes")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p = add("bounds", "Hoelder exponent bounds")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-richness", action="store_true",
                   help="skip the regular isotropic plane search")
    p = sub.add_parser("lab", help="numerical scaling experiments (step <= 2)")
    p.add_argument("experiment", choices=("volume", "tube", "ccdist"))
    p.add_argument("file", help="algebra JSON file, or builtin:NAME[:m]")
    p.add_argument("--eps", type=float, nargs="+")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--segments", type=int, default=16)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--target", type=float, nargs=3)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--json", action="store_true")
    mode.add_argument("--csv", action="store_true")
    return parser


def _validate_flags(args) -> str | None:
    if getattr(args, "trials", 1) < 1:
        return "--trials must be >= 1"
    if getattr(args, "k", 1) < 1:
        return "--k must be >= 1"
    if args.command == "lab":
        if args.samples < 1:
            return "--samples must be >= 1"
        if args.tau <= 0:
            return "--tau must be positive"
        if args.eps and any(e <= 0 for e in args.eps):
            return "--eps values must be positive"
        if args.segments < 8:
            return "--segments must be >= 8"
    return None


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    problem = _validate_flags(args)
    if problem:
        parser.error(problem)
    try:
        alg = read_algebra(args.file)
    except OSError as exc:
        print(f"carnot: cannot read {args.file}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except (SpecError, ValidationError) as exc:
        if getattr(args, "json", False):
            _emit_json({"ok": False, **exc.to_dict()})
        print(f"carnot: invalid algebra: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](alg, args)
    except (CapacityError, StepUnsupported) as exc:
        print(f"carnot: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ConvergenceError, CarnotError) as exc:
        print(f"carnot: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
