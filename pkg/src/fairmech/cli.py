"""Command line interface.

Exit codes: 0 success, 1 a predicate or audit failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .bivalued import BiValuedMechanism
from .exceptions import FairDivisionError, InvariantViolation, MalformedInputError, ScaleLimitError
from .fairness import check_alpha_mms, check_ef_uv, check_pareto_fractional, check_pareto_integral, check_prop1
from .harness import FAMILY_KINDS, MisreportFamily, instance_library, resolve_instance, test_truthfulness
from .mech2 import TwoAgentMechanism
from .mech3 import ThreeAgentMechanism
from .mechn import EnvyBoundedMechanism, PermutationLottery, Prop1MMSMechanism
from .model import FractionalAllocation, Instance, Lottery, load_json
from .numeric import as_rational, format_rational
from .realize import decompose_or_refute, ef_support
from .validation import check_allocation, check_fractional

MECHANISMS = ("two", "three", "n_ef", "prop1_mms", "bivalued")


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "__dataclass_fields__"):
        return {k: getattr(obj, k) for k in obj.__dataclass_fields__}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _emit(obj, out=None) -> None:
    text = json.dumps(obj, default=_jsonable, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_instance(ref: str) -> Instance:
    inst = resolve_instance(ref)
    if inst is not None:
        return inst
    if not os.path.exists(ref):
        raise MalformedInputError(f"{ref!r} is neither a library name nor a file")
    return Instance.from_dict(load_json(ref))


def _mechanism(args):
    if args.mech == "two":
        return TwoAgentMechanism()
    if args.mech == "three":
        return ThreeAgentMechanism()
    if args.mech == "n_ef":
        return EnvyBoundedMechanism()
    if args.mech == "prop1_mms":
        return Prop1MMSMechanism()
    if args.p is None or args.q is None:
        raise MalformedInputError("--mech bivalued needs --p and --q")
    return BiValuedMechanism(as_rational(args.p), as_rational(args.q), certify=args.certify, decompose=args.decompose)


def _support_reports(mech: str, inst: Instance, lottery) -> list:
    """The mechanism's per-allocation guarantee, evaluated on every support allocation."""
    if not isinstance(lottery, Lottery):
        return []
    out = []
    for alloc in lottery.support:
        if mech == "prop1_mms":
            out.append({"bundles": alloc.bundles, "prop1": check_prop1(inst, alloc)})
            continue
        u, v = {"three": (1, 1), "n_ef": ((inst.n - 1) ** 2, inst.n - 1)}.get(mech, (0, 1))
        report = check_ef_uv(inst, alloc, u, v)
        out.append({"bundles": alloc.bundles, "u": u, "v": v, "satisfied": report.satisfied})
    return out


def cmd_run(args) -> int:
    inst = _load_instance(args.instance)
    mech = _mechanism(args)
    try:
        mech.fit(inst)
    except InvariantViolation as exc:
        print(f"audit failed: {exc}", file=sys.stderr)
        return 1
    if args.sample:
        _emit(mech.sample(args.seed).to_dict(), args.output)
    elif isinstance(mech.lottery_, Lottery):
        _emit(mech.lottery_.to_dict(), args.output)
    elif isinstance(mech.lottery_, PermutationLottery):
        _emit({"uniform_over_permutations": [list(b) for b in mech.lottery_.bundles]}, args.output)
    else:
        _emit({"fractional": mech.fractional_.to_dict()}, args.output)
    if args.trace:
        extras = {k: getattr(mech, k) for k in ("trace_", "market_certificate_", "truncated_agents_", "steps_") if hasattr(mech, k)}
        extras["expected_utilities"] = mech.expected_utilities_
        extras["support_reports"] = _support_reports(args.mech, inst, mech.lottery_)
        print(json.dumps(extras, default=_jsonable, indent=2), file=sys.stderr)
    print("audit: pass", file=sys.stderr)
    return 0


def cmd_check(args) -> int:
    inst = _load_instance(args.instance)
    alloc = check_allocation(load_json(args.allocation), inst)
    pred = args.predicate
    if pred in ("ef_uv", "ef1"):
        u, v = (0, 1) if pred == "ef1" else (args.u, args.v)
        report = check_ef_uv(inst, alloc, u, v)
        _emit({"satisfied": report.satisfied, "violations": report.violations})
        ok = report.satisfied
    elif pred == "prop1":
        ok = check_prop1(inst, alloc)
        _emit({"satisfied": ok})
    elif pred == "mms":
        ok = check_alpha_mms(inst, alloc, as_rational(args.alpha))
        _emit({"satisfied": ok, "alpha": as_rational(args.alpha)})
    elif pred == "pareto":
        ok, witness = check_pareto_integral(inst, alloc)
        _emit({"satisfied": ok, "dominated_by": witness})
    else:
        report = check_pareto_fractional(inst, alloc.as_fractional(inst.m))
        ok = report.optimal
        _emit({"satisfied": ok, "gain": report.gain, "improvement": report.improvement})
    return 0 if ok else 1


def cmd_realize(args) -> int:
    inst = _load_instance(args.instance)
    if args.fractional == "equal":
        x = FractionalAllocation.equal_division(inst.n, inst.m)
    else:
        x = check_fractional(load_json(args.fractional), inst)
    result = decompose_or_refute(x, ef_support(inst, args.u, args.v))
    if result.feasible:
        _emit(result.lottery.to_dict(), args.output)
        return 0
    cert = result.certificate
    _emit(
        {
            "infeasible": True,
            "certificate": {"offset": cert.offset, "weights": cert.weights},
            "candidates": result.n_candidates,
        },
        args.output,
    )
    return 1


def cmd_truthful(args) -> int:
    inst = _load_instance(args.instance)
    levels = None if args.levels is None else tuple(as_rational(x) for x in args.levels.split(","))
    kwargs = {"levels": levels, "budget": args.budget}
    if args.scalars:
        kwargs["scalars"] = tuple(as_rational(x) for x in args.scalars.split(","))
    if args.reports:
        kwargs["reports"] = tuple(tuple(row) for row in load_json(args.reports))
    family = MisreportFamily(args.family, **kwargs)
    p = None if args.p is None else as_rational(args.p)
    q = None if args.q is None else as_rational(args.q)
    report = test_truthfulness(args.mech, inst, family, p=p, q=q)
    _emit({"coverage": report.coverage(), "max_gain": report.max_gain, "agents": report.agents})
    return 0 if report.truthful_on_family else 1


def cmd_library(args) -> int:
    lib = instance_library(args.u, args.v)
    if args.name:
        inst = lib.get(args.name) or resolve_instance(args.name)
        if inst is None:
            raise MalformedInputError(f"no library instance named {args.name!r}")
        _emit(inst.to_dict(), args.output)
    else:
        _emit({name: inst.to_dict() for name, inst in sorted(lib.items())}, args.output)
    return 0


def cmd_sample(args) -> int:
    data = load_json(args.lottery) if args.lottery else _read_stdin_json()
    lottery = Lottery.from_dict(data)
    _emit(lottery.sample(args.seed).to_dict())
    return 0


def _read_stdin_json():
    try:
        return json.load(sys.stdin)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"stdin: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairmech", description="Truthful randomized fair division, exactly.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a mechanism and print its lottery")
    run.add_argument("--mech", choices=MECHANISMS, required=True)
    run.add_argument("--instance", required=True, help="instance file or library name")
    run.add_argument("--sample", action="store_true", help="print one drawn allocation instead")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--trace", action="store_true", help="dump construction details to stderr")
    run.add_argument("--p")
    run.add_argument("--q")
    run.add_argument("--certify", action=argparse.BooleanOptionalAction, default=True)
    run.add_argument("--decompose", action=argparse.BooleanOptionalAction, default=True)
    run.add_argument("--output")
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="evaluate a predicate on an allocation")
    check.add_argument("--predicate", choices=("ef_uv", "ef1", "prop1", "mms", "pareto", "pareto_fractional"), required=True)
    check.add_argument("--u", type=int, default=0)
    check.add_argument("--v", type=int, default=1)
    check.add_argument("--alpha", default="1")
    check.add_argument("--instance", required=True)
    check.add_argument("--allocation", required=True)
    check.set_defaults(func=cmd_check)

    realize = sub.add_parser("realize", help="decompose a fractional allocation or refute it")
    realize.add_argument("--instance", required=True)
    realize.add_argument("--fractional", required=True, help="'equal' or a shares file")
    realize.add_argument("--u", type=int, default=0)
    realize.add_argument("--v", type=int, default=1)
    realize.add_argument("--output")
    realize.set_defaults(func=cmd_realize)

    truthful = sub.add_parser("truthful", help="search a misreport family for profitable lies")
    truthful.add_argument("--mech", required=True, help="two, three, three-index, n_ef, prop1_mms, bivalued, mnw-baseline")
    truthful.add_argument("--instance", required=True)
    truthful.add_argument("--family", default="level-patterns", choices=FAMILY_KINDS)
    truthful.add_argument("--levels", help="comma-separated levels for level-patterns")
    truthful.add_argument("--scalars", help="comma-separated factors for scalar-rescalings")
    truthful.add_argument("--reports", help="JSON file with explicit report rows")
    truthful.add_argument("--budget", type=int)
    truthful.add_argument("--p")
    truthful.add_argument("--q")
    truthful.set_defaults(func=cmd_truthful)

    library = sub.add_parser("library", help="dump named instances")
    library.add_argument("--name")
    library.add_argument("--u", type=int, default=0)
    library.add_argument("--v", type=int, default=1)
    library.add_argument("--output")
    library.set_defaults(func=cmd_library)

    sample = sub.add_parser("sample", help="draw one allocation from a lottery file (or stdin)")
    sample.add_argument("--lottery")
    sample.add_argument("--seed", type=int, default=0)
    sample.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (MalformedInputError, ScaleLimitError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FairDivisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
