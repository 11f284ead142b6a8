"""Command-line interface.

Every subcommand prints one JSON document on stdout with rationals as exact
strings. Exit codes: 0 yes / verified, 1 no / not verified, 2 input error,
3 resource limit. Wall-clock timing and search counters go to stderr
(``--verbose``) and to the ``--report`` file only, so stdout is
byte-identical across runs and across ``--workers`` settings.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from .augment import augment_from_mechanism, augmentation_to_dict
from .errors import InputError, ResourceExceeded
from .instance import Instance, bit_length, conditional_beliefs, format_rational, load_instance
from .mechanism import (
    Mechanism,
    enumerate_equilibria,
    load_mechanism,
    parse_mechanism,
    parse_strategy,
    payments_to_dict,
    strategy_key,
    verify_strong_implementation,
)
from .strong_general import (
    Limits,
    certificate_from_dict,
    certificate_problems,
    certificate_to_dict,
    decide_strong,
)
from .strong_single import decide_strong_single
from .weak import decide_weak

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


def _fmt(values: Iterable[Fraction]) -> list[str]:
    return [format_rational(v) for v in values]


def _max_bits(values: Iterable[Fraction]) -> int:
    return max((bit_length(v) for v in values), default=0)


def _payment_values(payments) -> list[Fraction]:
    return [v for vec in payments.values() for v in vec]


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _mechanism_arg(inst: Instance, args: argparse.Namespace) -> Mechanism:
    if getattr(args, "mechanism", None):
        return load_mechanism(inst, args.mechanism)
    if getattr(args, "payments", None):
        raw = _read_json(args.payments)
        if isinstance(raw, dict) and "payments" not in raw:
            raw = {"payments": raw}
        return parse_mechanism(inst, raw)
    raise InputError("one of --mechanism or --payments is required")


# subcommands return (exit code, stdout document, extra report-only fields)


def cmd_validate(args: argparse.Namespace):
    inst = load_instance(args.instance)
    doc = {
        "valid": True,
        "agents": inst.n,
        "outcomes": len(inst.outcomes),
        "typeProfiles": len(inst.profiles),
        "productPrior": inst.is_product_prior(),
    }
    return EXIT_YES, doc, {}


def cmd_weak(args: argparse.Namespace):
    inst = load_instance(args.instance)
    verdict = decide_weak(inst)
    doc: dict[str, Any] = {"command": "weak", "verdict": "yes" if verdict.implementable else "no"}
    if verdict.implementable:
        doc["payments"] = payments_to_dict(inst, verdict.payments)
        doc["maxPaymentBits"] = _max_bits(_payment_values(verdict.payments))
    else:
        doc["refutation"] = _fmt(verdict.refutation)
    doc["negativeCycleCheck"] = verdict.cross_check
    return (EXIT_YES if verdict.implementable else EXIT_NO), doc, {}


def cmd_strong(args: argparse.Namespace):
    inst = load_instance(args.instance)
    limits = Limits.parse(args.limits) if args.limits else Limits()
    doc: dict[str, Any] = {"command": "strong"}
    if inst.n == 1 and not args.force_general:
        verdict = decide_strong_single(inst)
        doc["solver"] = "single"
        doc["verdict"] = "yes" if verdict.implementable else "no"
        if verdict.implementable:
            doc["payments"] = payments_to_dict(inst, verdict.payments)
            doc["strictSlack"] = format_rational(verdict.strict_slack)
            doc["maxPaymentBits"] = _max_bits(_payment_values(verdict.payments))
        else:
            doc["refutation"] = _fmt(verdict.refutation)
        return (EXIT_YES if verdict.implementable else EXIT_NO), doc, {}

    doc["solver"] = "general"
    try:
        result = decide_strong(inst, limits, workers=args.workers)
    except ResourceExceeded as exc:
        doc["verdict"] = "resource-exceeded"
        doc["reason"] = str(exc)
        return EXIT_LIMIT, doc, {"statistics": exc.statistics}
    doc["verdict"] = "yes" if result.implementable else "no"
    if result.certificate is not None:
        cert = result.certificate
        doc["certificate"] = certificate_to_dict(inst, cert)
        values = _payment_values(cert.payments)
        values += [v for pay in cert.elimination_payments.values() for v in pay.values()]
        doc["maxPaymentBits"] = _max_bits(values)
    return (EXIT_YES if result.implementable else EXIT_NO), doc, {"statistics": result.statistics.as_dict()}


def _report_json(inst: Instance, mech: Mechanism, rep) -> dict[str, Any]:
    out: dict[str, Any] = {"profile": strategy_key(mech.bids, rep.profile)}
    if rep.classification is not None:
        out["class"] = rep.classification
    return out


def cmd_equilibria(args: argparse.Namespace):
    inst = load_instance(args.instance)
    mech = _mechanism_arg(inst, args)
    reports = enumerate_equilibria(inst, conditional_beliefs(inst), mech)
    doc = {
        "command": "equilibria",
        "direct": mech.direct,
        "count": len(reports),
        "equilibria": [_report_json(inst, mech, r) for r in reports],
    }
    return (EXIT_YES if reports else EXIT_NO), doc, {}


def cmd_verify_mechanism(args: argparse.Namespace):
    inst = load_instance(args.instance)
    mech = _mechanism_arg(inst, args)
    verdict = verify_strong_implementation(inst, conditional_beliefs(inst), mech)
    doc: dict[str, Any] = {
        "command": "verify-mechanism",
        "implements": verdict.implements,
        "equilibria": verdict.equilibria,
    }
    if not verdict.implements:
        doc["reason"] = verdict.reason
        if verdict.witness is not None:
            doc["witness"] = _report_json(inst, mech, verdict.witness)
    return (EXIT_YES if verdict.implements else EXIT_NO), doc, {}


def cmd_verify_certificate(args: argparse.Namespace):
    inst = load_instance(args.instance)
    raw = _read_json(args.certificate)
    if isinstance(raw, dict) and "certificate" in raw:
        raw = raw["certificate"]  # accept a full `strong` report as well
    if not isinstance(raw, dict):
        raise InputError("certificate must be a JSON object")
    cert = certificate_from_dict(inst, raw)
    problems = certificate_problems(inst, conditional_beliefs(inst), cert)
    doc = {"command": "verify-certificate", "valid": not problems, "problems": problems}
    return (EXIT_NO if problems else EXIT_YES), doc, {}


def cmd_augment(args: argparse.Namespace):
    inst = load_instance(args.instance)
    mech = _mechanism_arg(inst, args)
    beliefs = conditional_beliefs(inst)
    alpha = parse_strategy(inst, mech, args.strategy)
    result = augment_from_mechanism(inst, beliefs, mech, alpha)
    check = verify_strong_implementation(inst, beliefs, result.mechanism)
    doc = {
        "command": "augment",
        "mechanism": augmentation_to_dict(inst, mech, result),
        "truthfulEquilibrium": result.truthful_equilibrium,
        "sourceImplements": result.source_implements,
        "implements": check.implements,
    }
    return (EXIT_YES if result.truthful_equilibrium and check.implements else EXIT_NO), doc, {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="strongimpl", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="summary and timing on stderr")
    common.add_argument("--report", metavar="PATH", help="also write the report, with timing, to PATH")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("instance", help="instance JSON file")
        p.set_defaults(func=func)
        return p

    def mechanism_source(p: argparse.ArgumentParser) -> None:
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--mechanism", metavar="PATH", help="mechanism JSON file")
        group.add_argument("--payments", metavar="PATH", help="payments of the direct mechanism")

    add("validate", cmd_validate, "check an instance file")
    add("weak", cmd_weak, "decide weak implementability")
    p = add("strong", cmd_strong, "decide strong implementability")
    p.add_argument("--force-general", action="store_true", help="use the general search even for one agent")
    p.add_argument("--limits", metavar="P,B,S", help="profile, branch and seconds limits")
    p.add_argument("--workers", type=int, default=1, help="parallel search processes")
    mechanism_source(add("equilibria", cmd_equilibria, "enumerate pure Bayesian equilibria"))
    mechanism_source(add("verify-mechanism", cmd_verify_mechanism, "check strong implementation by brute force"))
    p = add("verify-certificate", cmd_verify_certificate, "re-check a strong certificate")
    p.add_argument("certificate", help="certificate JSON (or a full strong report)")
    p = add("augment", cmd_augment, "build the augmented revelation mechanism")
    mechanism_source(p)
    p.add_argument("--strategy", required=True, help="equilibrium, e.g. 'b1,b2|c1,c2'")
    return parser


def _dump(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    extra: dict[str, Any] = {}
    try:
        code, doc, extra = args.func(args)
    except InputError as exc:
        code, doc = EXIT_INPUT, {"error": type(exc).__name__, "message": str(exc)}
        if args.command == "validate":
            doc = {"valid": False, **doc}
    except ResourceExceeded as exc:
        code, doc = EXIT_LIMIT, {"error": type(exc).__name__, "message": str(exc)}
        extra = {"statistics": exc.statistics}
    elapsed = time.perf_counter() - started
    sys.stdout.write(_dump(doc))
    if args.verbose:
        verdict = doc.get("verdict", doc.get("valid", doc.get("implements", doc.get("error"))))
        print(f"{args.command}: {verdict} (exit {code}, {elapsed:.3f}s)", file=sys.stderr)
        if "statistics" in extra:
            print("statistics: " + json.dumps(extra["statistics"], sort_keys=True), file=sys.stderr)
    if args.report:
        report = {**doc, **extra, "exitCode": code, "seconds": round(elapsed, 6)}
        Path(args.report).write_text(_dump(report), encoding="utf-8")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
