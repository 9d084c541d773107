"""Command-line entry point: ``conecarve {gen,certify,emit,bench}``.

Exit codes: 0 success, 2 precondition violation, 3 certification failure,
4 size guard.
"""

from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction
from pathlib import Path

from . import bench
from .cone3 import build_P, build_P_tilde, canonical_witness, witness_values
from .errors import CertificationError, ConecarveError, PreconditionError, SizeGuardError
from .formats import ScheduleDocument, dumps_system, rat_str, write_lp, write_mps
from .linsys import LinearSystem
from .towern import build_QN, build_QN_closedform, build_RN, disaggregation_layout
from .triplesearch import CONSTRUCTIONS, build_schedule

EXIT_OK, EXIT_PRECONDITION, EXIT_CERTIFICATION, EXIT_SIZE = 0, 2, 3, 4
SYSTEMS = ("P", "P_tilde", "QN", "QN_closedform", "RN", "disaggregation")
FORMATS = ("lp", "mps", "json")


def rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def integer(text: str) -> int:
    q = rational(text)
    if q.denominator != 1:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(q)


def render(system: LinearSystem, fmt: str, objective=None) -> str:
    if fmt == "lp":
        return write_lp(system, objective)
    if fmt == "mps":
        return write_mps(system, objective)
    return dumps_system(system)


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------- gen


def cmd_gen(args) -> int:
    kw = {}
    if args.kappa is not None:
        kw["kappa"] = args.kappa
    schedule = build_schedule(args.construction, delta=args.delta, C=args.C, **kw)
    _write(ScheduleDocument.from_schedule(schedule).dumps(), args.out)
    if args.emit:
        if args.N is None:
            raise PreconditionError("--emit needs --N (cone dimension, at least 3)")
        system = build_QN(schedule, args.N)
        stem = args.model_out or f"{args.construction}-N{args.N}"
        for fmt in args.emit:
            Path(f"{stem}.{fmt}").write_text(render(system, fmt))
            print(f"wrote {stem}.{fmt}", file=sys.stderr)
    return EXIT_OK


# ------------------------------------------------------------ certify


def certify_document(doc: ScheduleDocument, delta=None, C=None) -> list[str]:
    """Every exact check on a schedule document; returns the failures."""
    failures = []
    for j, (a, b, c) in enumerate(doc.triples, start=1):
        if min(a, b, c) <= 0 or a * a + b * b != c * c:
            failures.append(f"stage {j}: {(a, b, c)} is not a Pythagorean triple")
    if failures:
        return failures
    schedule = doc.to_schedule()
    cert = schedule.certificate(delta, C)
    failures += list(cert.failures)
    if doc.sec_final is not None and doc.sec_final != cert.sec_final:
        failures.append(f"recorded sec_final {doc.sec_final} differs from {cert.sec_final}")
    if doc.half_angle_ok != cert.half_angle_ok:
        failures.append("recorded half-angle flag differs from the recomputed one")
    # inner containment on the boundary rays of the schedule's own triples
    P, Pt = build_P(schedule), build_P_tilde(schedule)
    for t in schedule.triples:
        for x in ((t.a, t.b, t.c), (-t.b, t.a, t.c)):
            values = witness_values(x, schedule)
            if not (P.is_satisfied(values) and Pt.is_satisfied(values)):
                failures.append(f"canonical witness of {x} violates the lifted rows")
    return failures


def cmd_certify(args) -> int:
    text = Path(args.schedule).read_text()
    try:
        doc = ScheduleDocument.loads(text)
    except (KeyError, ValueError, TypeError) as exc:
        raise PreconditionError(f"cannot read schedule document: {exc}") from exc
    failures = certify_document(doc, args.delta, args.C)
    for f in failures:
        print(f"FAIL {f}")
    if failures:
        return EXIT_CERTIFICATION
    bound = args.delta if args.delta is not None else doc.delta
    extra = f" <= 1 + {rat_str(bound)}" if bound is not None else ""
    sec = doc.triples[-1][2], doc.triples[-1][1]
    print(f"PASS {doc.construction} schedule, nu = {len(doc.triples)}, sec = {sec[0]}/{sec[1]}{extra}")
    return EXIT_OK


# --------------------------------------------------------------- emit


def select_system(args) -> LinearSystem:
    def schedule():
        if not args.schedule:
            raise PreconditionError(f"system {args.system} needs --schedule")
        return ScheduleDocument.loads(Path(args.schedule).read_text()).to_schedule()

    if args.system == "P":
        return build_P(schedule())
    if args.system == "P_tilde":
        return build_P_tilde(schedule())
    if args.system == "disaggregation":
        return disaggregation_layout(_need(args.N, "--N"), schedule())
    if args.system == "QN":
        return build_QN(schedule(), _need(args.N, "--N"))
    if args.system == "QN_closedform":
        return build_QN_closedform(_need(args.epsilon, "--epsilon"), _need(args.N, "--N"))
    return build_RN(_need(args.N, "--N"), delta=args.delta, epsilon=args.epsilon)


def _need(value, flag: str):
    if value is None:
        raise PreconditionError(f"missing {flag}")
    return value


def cmd_emit(args) -> int:
    _write(render(select_system(args), args.format), args.out)
    return EXIT_OK


# -------------------------------------------------------------- bench


def cmd_bench(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    instance = bench.paper_instance(args.N)
    formulations = bench.build_formulations(instance, args.delta)
    objectives = [bench.random_objective(args.N, args.seed + k) for k in range(args.objectives)]
    obj0 = dict(zip((f"x{j}" for j in range(1, args.N + 1)), objectives[0])) if objectives else None
    for tag, system in formulations.items():
        for fmt in args.formats:
            (out / f"{instance.name}_{tag}.{fmt}").write_text(render(system, fmt, obj0))
    with open(out / "objectives.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["objective_index", "seed", *(f"beta{j}" for j in range(1, args.N + 1))])
        for k, beta in enumerate(objectives):
            w.writerow([k, args.seed + k, *(rat_str(b) for b in beta)])
    try:
        records = bench.run_lp_comparison(instance, objectives, formulations, max_dim=args.max_dim)
    except SizeGuardError as exc:
        print(f"size guard: {exc}; model files written to {out}", file=sys.stderr)
        return EXIT_SIZE
    with open(out / "results.csv", "w", newline="") as fh:
        bench.write_csv(records, fh)
    print(f"wrote {len(records)} records to {out / 'results.csv'}", file=sys.stderr)
    return EXIT_OK


# ------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conecarve", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an angle schedule")
    g.add_argument("construction", choices=CONSTRUCTIONS)
    g.add_argument("--delta", type=rational)
    g.add_argument("--C", type=integer)
    g.add_argument("--kappa", type=rational, help="growth factor for the optimized construction")
    g.add_argument("--N", type=int, help="cone dimension for --emit")
    g.add_argument("--emit", nargs="*", choices=FORMATS, default=[])
    g.add_argument("--model-out", help="file stem for emitted models")
    g.add_argument("--out", "-o", help="schedule document path (default stdout)")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("certify", help="re-check a schedule document exactly")
    c.add_argument("schedule")
    c.add_argument("--delta", type=rational)
    c.add_argument("--C", type=integer)
    c.set_defaults(func=cmd_certify)

    e = sub.add_parser("emit", help="write a constraint system to LP, MPS or JSON")
    e.add_argument("--system", choices=SYSTEMS, required=True)
    e.add_argument("--schedule", help="schedule document (P, P_tilde, QN, disaggregation)")
    e.add_argument("--N", type=int)
    e.add_argument("--delta", type=rational)
    e.add_argument("--epsilon", type=rational)
    e.add_argument("--format", choices=FORMATS, default="lp")
    e.add_argument("--out", "-o")
    e.set_defaults(func=cmd_emit)

    b = sub.add_parser("bench", help="intersection-of-balls LP comparison")
    b.add_argument("--N", type=int, required=True)
    b.add_argument("--objectives", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--delta", type=rational, default=bench.DEFAULT_DELTA)
    b.add_argument("--max-dim", type=int, default=bench.DEFAULT_MAX_DIM)
    b.add_argument("--formats", nargs="*", choices=FORMATS, default=["lp", "mps"])
    b.add_argument("--out-dir", default=".")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (ConecarveError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
