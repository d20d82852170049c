"""Command-line surface: generate examples, certify, search, and evaluate statements.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .braiding import UnsupportedPairError
from .dsl import ParseError, run_statements
from .examples_io import (Bundle, SchemaError, graded_category, identity_control,
                          kac_takesaki, load_bundle, save_bundle)
from .groups import cyclic, symmetric
from .solver import DegreePreservingConstraint, SearchProblem, search
from .tensor import LegError


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        digest.update(handle.read())
    return digest.hexdigest()


def _canonical_report(tree) -> str:
    from .examples_io import _canonical_json
    return _canonical_json(tree) + "\n"


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _report(input_path: str | None, checks: list[dict], tol: float,
            seed: int | None = None) -> dict:
    report = {
        "tool": {"name": "braidmu", "version": __version__},
        "tolerance": tol,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }
    if input_path is not None:
        report["input"] = {"path": os.path.basename(input_path),
                           "sha256": _sha256(input_path)}
    if seed is not None:
        report["seed"] = seed
    return report


def _check(name: str, kind: str, value, tol=None, expected=None, elapsed=0.0) -> dict:
    if kind == "residual":
        ok = bool(value < tol) if value == value else False  # NaN never passes
    elif kind == "rank":
        ok = bool(value == expected)
    else:
        ok = bool(value)
    entry = {"name": name, "kind": kind, "value": value, "pass": ok,
             "wall_time_s": round(elapsed, 6)}
    if tol is not None:
        entry["tol"] = tol
    if expected is not None:
        entry["expected"] = expected
    return entry


def cmd_generate(args) -> int:
    bundle = Bundle()
    if args.kind == "kac-takesaki":
        if args.group.lower() == "zn":
            if args.n is None:
                print("error: --group Zn needs --n", file=sys.stderr)
                return 2
            group = cyclic(args.n)
        elif args.group.upper() == "S3":
            group = symmetric(3)
        else:
            print(f"error: unknown group {args.group!r}", file=sys.stderr)
            return 2
        mu = kac_takesaki(group)
        bundle.spaces[mu.space.id] = mu.space
        bundle.operators["W"] = mu.op
        bundle.groups[group.name] = group
    elif args.kind == "super":
        dim = args.dim or 2
        grading = tuple(i % 2 for i in range(dim))
        spaces, _ = graded_category(2, {"L": (dim, grading)})
        bundle.spaces.update(spaces)
        bundle.braiding_kind = "phase"
        bundle.braiding_modulus = 2
    elif args.kind == "identity":
        mu = identity_control(args.dim or 2)
        bundle.spaces[mu.space.id] = mu.space
        bundle.operators["F"] = mu.op
        bundle.braiding_kind = "explicit"
        bundle.braiding_pairs = [mu.braiding.braid(mu.space, mu.space)]
    elif args.kind == "group-yd":
        from .examples_io import group_yd_module
        from .tensor import identity as identity_op
        if args.group.lower() != "zn" or (args.n or 2) != 2:
            print("error: group-yd currently generates the Z2 module", file=sys.stderr)
            return 2
        group = cyclic(2)
        module, mu = group_yd_module(group, [0, 1], [np.eye(2), np.diag([1.0, -1.0])])
        bundle.spaces[mu.space.id] = mu.space
        bundle.spaces[module.space.id] = module.space
        bundle.operators["W"] = mu.op
        bundle.operators["U"] = module.corep
        bundle.operators["V"] = module.rep
        bundle.operators["a"] = identity_op((mu.space,))
        bundle.groups[group.name] = group
    else:
        print(f"error: unknown kind {args.kind!r}", file=sys.stderr)
        return 2
    save_bundle(bundle, args.output)
    print(f"wrote {args.output}")
    return 0


def cmd_analyze(args) -> int:
    try:
        bundle = load_bundle(args.file)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.object not in bundle.operators:
        print(f"error: no operator named {args.object!r} in the bundle", file=sys.stderr)
        return 2
    try:
        mu = bundle.mult_unitary(args.object)
    except (SchemaError, LegError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    def timed(fn):
        start = time.perf_counter()
        value = fn()
        return value, time.perf_counter() - start

    from . import multunitary as mun
    from .braiding import check_hexagons
    from .spans import DecompositionError

    checks = []
    unit, dt = timed(mu.unitarity_residual)
    checks.append(_check("unitarity", "residual", unit, args.tol, elapsed=dt))
    pent, dt = timed(lambda: mun.pentagon_residual(mu))
    checks.append(_check("pentagon", "residual", pent, args.tol, elapsed=dt))
    try:
        hexres, dt = timed(lambda: check_hexagons(mu.braiding, [mu.space])["max_residual"])
    except UnsupportedPairError:
        hexres, dt = float("nan"), 0.0
    checks.append(_check("braiding-hexagon", "residual", hexres, args.tol, elapsed=dt))
    route, dt = timed(lambda: mun.routing_agreement(mu))
    checks.append(_check("routing-agreement", "residual", route, args.tol, elapsed=dt))
    r, dt = timed(lambda: mun.classify_regularity(mu))
    checks.append(_check("rank-c", "rank", r.rank_c, expected=r.full, elapsed=dt))
    checks.append(_check("rank-d", "rank", r.rank_d, expected=r.full))
    checks.append(_check("commutant-dim", "rank", r.commutant_dim, expected=1))
    checks.append(_check("regular", "flag", r.regular))
    checks.append(_check("bi-regular", "flag", r.bi_regular))
    checks.append(_check("dual-consistent", "flag", r.dual_consistent))
    (pr, pl), dt = timed(lambda: mun.podles_conditions(mu, "op", args.tol))
    checks.append(_check("podles-right", "flag", pr, elapsed=dt))
    checks.append(_check("podles-left", "flag", pl))
    try:
        co, dt = timed(lambda: mun.coassociativity_residual(mu, "op", args.tol))
    except DecompositionError:
        co, dt = float("inf"), 0.0
    checks.append(_check("coassociativity", "residual", co, args.tol, elapsed=dt))
    (mo, se), dt = timed(lambda: mun.multiplier_checks(mu, "op", args.tol))
    checks.append(_check("multiplier", "flag", mo, elapsed=dt))
    checks.append(_check("sandwich-span", "flag", se))
    report = _report(args.file, checks, args.tol)
    text = _canonical_report(report)
    if args.report:
        _write_atomic(args.report, text)
    print(text, end="")
    return 0 if report["pass"] else 1


def cmd_search(args) -> int:
    if args.category == "flip":
        space_grading = None
        from .braiding import FlipBraiding
        from .tensor import Space
        space = Space("L", args.dim, None)
        provider = FlipBraiding()
        constraints = ()
    elif args.category == "super":
        from .tensor import Space
        space = Space("L", args.dim, tuple(i % 2 for i in range(args.dim)))
        from .braiding import PhaseBraiding
        provider = PhaseBraiding(2)
        constraints = (DegreePreservingConstraint(2),)
    elif args.category == "phase":
        from .tensor import Space
        space = Space("L", args.dim, tuple(i % args.modulus for i in range(args.dim)))
        from .braiding import PhaseBraiding
        provider = PhaseBraiding(args.modulus)
        constraints = (DegreePreservingConstraint(args.modulus),)
    else:
        print(f"error: unknown category {args.category!r}", file=sys.stderr)
        return 2
    problem = SearchProblem(space=space, braiding=provider, constraints=constraints,
                            seed=args.seed, restarts=args.restarts,
                            max_iter=args.max_iter, target_residual=args.target_residual)
    start = time.perf_counter()
    results = search(problem)
    elapsed = time.perf_counter() - start

    bundle = Bundle()
    bundle.spaces[space.id] = space
    if args.category == "flip":
        bundle.braiding_kind = "flip"
    else:
        bundle.braiding_kind = "phase"
        bundle.braiding_modulus = 2 if args.category == "super" else args.modulus
    checks = []
    for idx, res in enumerate(results):
        name = f"F_{idx:03d}"
        bundle.operators[name] = res.mu.op
        checks.append(_check(f"{name}-pentagon ({res.label}, restart {res.restart})",
                             "residual", res.residual, args.target_residual))
    save_bundle(bundle, args.output)
    checks.append(_check("count", "rank", len(results), expected=len(results),
                         elapsed=elapsed))
    report = _report(None, checks, args.target_residual, seed=args.seed)
    report["count"] = len(results)
    text = _canonical_report(report)
    if args.report:
        _write_atomic(args.report, text)
    print(text, end="")
    return 0


def cmd_eval(args) -> int:
    try:
        bundle = load_bundle(args.data)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        with open(args.statements, "r") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        results = run_statements(text, bundle.operators, bundle.spaces,
                                 bundle.provider(), tol=args.tol)
    except (ParseError, LegError, UnsupportedPairError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    checks = []
    for res in results:
        value = res.residual if res.residual is not None else 0.0
        checks.append(_check(res.statement.text, "residual", value, args.tol))
        status = "pass" if res.passed else "FAIL"
        print(f"[{status}] line {res.statement.line}: {res.statement.text} "
              f"(residual {value:.3e})")
    report = _report(args.statements, checks, args.tol)
    if args.report:
        _write_atomic(args.report, _canonical_report(report))
    return 0 if report["pass"] else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="braidmu",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("generate", help="write an example bundle")
    p.add_argument("kind", choices=["kac-takesaki", "super", "identity", "group-yd"])
    p.add_argument("--group", default="Zn")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="run the full certificate on a bundle operator")
    p.add_argument("file")
    p.add_argument("--object", default="W")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("search", help="search for braided multiplicative unitaries")
    p.add_argument("--category", default="super", choices=["flip", "super", "phase"])
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--modulus", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--target-residual", type=float, default=1e-8)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="evaluate a statement file against a bundle")
    p.add_argument("statements")
    p.add_argument("data")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_eval)

    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except argparse.ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
