"""Command-line front end.

Subcommands: solve, check, construct, gen, experiment, feasible.  Output is
JSON by default so other tools can consume it; --pretty switches to aligned
tables for reading by hand.  Identical inputs produce byte-identical output.

Exit codes: 0 on success, 1 on domain errors (bad files, bad instances,
capacity or timeout), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .axioms import (
    Axiom,
    AxiomReport,
    Caps,
    DEFAULT_CAPS,
    check_all,
    check_core,
    check_exh,
    check_imp,
    check_ir,
    check_mr,
    check_po_family,
    check_prop,
)
from .experiments import run_batch, summarize, write_records, write_summary
from .feasibility import (
    implementability_certificate,
    is_affordable_set,
    is_mr_feasible_set,
)
from .gen import REGIMES, generate
from .model import (
    CapacityError,
    InputError,
    ParseError,
    PfcError,
    instance_to_dict,
    parse_instance,
    parse_outcome,
)
from .rules import (
    ALL_RULES,
    Constraint,
    RuleId,
    construct_imp_ir_poimp,
    enumerate_feasible_sets,
    solve,
)


def _load_json(path):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc.strerror or exc)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("%s: invalid JSON: %s" % (path, exc)) from None


def _caps_arg(text):
    values = {}
    for part in text.split(","):
        key, sep, raw = part.partition("=")
        key = key.strip()
        if not sep or key not in ("n", "m"):
            raise argparse.ArgumentTypeError(
                "caps must look like n=16,m=24, got %r" % (text,)
            )
        try:
            values[key] = int(raw)
        except ValueError:
            raise argparse.ArgumentTypeError("cap %s=%r is not an integer" % (key, raw))
    return Caps(
        n=values.get("n", DEFAULT_CAPS.n),
        m=values.get("m", DEFAULT_CAPS.m),
    )


def _rule_arg(text):
    try:
        return RuleId.parse(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _rules_arg(text):
    return tuple(_rule_arg(part) for part in text.split(","))


def _axioms_arg(text):
    axioms = []
    for part in text.split(","):
        name = part.strip().upper().replace("-", "_")
        try:
            axioms.append(Axiom[name])
        except KeyError:
            raise argparse.ArgumentTypeError("unknown axiom %r" % (part,))
    return tuple(axioms)


def _seeds_arg(text):
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            return range(int(lo), int(hi))
        if "," in text:
            return tuple(int(part) for part in text.split(","))
        return range(int(text))
    except ValueError:
        raise argparse.ArgumentTypeError(
            "seeds must be COUNT, LO:HI, or a comma list, got %r" % (text,)
        )


def _constraint_arg(text):
    try:
        return Constraint(text.strip().upper())
    except ValueError:
        raise argparse.ArgumentTypeError("unknown constraint %r" % (text,))


def _emit(doc, pretty_lines, args):
    if args.pretty:
        for line in pretty_lines:
            print(line)
    else:
        print(json.dumps(doc, indent=2))


def _aligned(rows):
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return [
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    ]


def _pretty_result(doc):
    lines = [
        "rule          %s" % doc["rule"],
        "funded        %s" % (" ".join(doc["funded"]) or "(nothing)"),
        "charges       %s" % " ".join("%s=%d" % kv for kv in doc["charges"].items()),
    ]
    if "payments" in doc:
        cells = []
        for agent, row in doc["payments"].items():
            for project, amount in row.items():
                cells.append("%s>%s=%d" % (agent, project, amount))
        lines.append("payments      %s" % " ".join(cells))
    welfare = doc["welfare"]
    lines.append("util_total    %d" % welfare["util_total"])
    lines.append(
        "utilities     %s" % " ".join(str(u) for u in welfare["sorted_utilities"])
    )
    lines.append(
        "nash          zero_count=%d product=%d"
        % (welfare["nash"]["zero_count"], welfare["nash"]["product"])
    )
    lines.append(
        "optimal_sets  %s"
        % "; ".join("{%s}" % ",".join(s) for s in doc["optimal_sets"])
    )
    return lines


def _pretty_reports(reports):
    rows = [["axiom", "holds", "witness"]]
    for report in reports:
        holds = "skipped" if report["holds"] is None else str(report["holds"]).lower()
        witness = "-" if report["witness"] is None else json.dumps(report["witness"])
        rows.append([report["axiom"], holds, witness])
    return _aligned(rows)


def _run_one_axiom(inst, out, axiom, caps):
    try:
        if axiom is Axiom.MR:
            return check_mr(inst, out)
        if axiom is Axiom.IMP:
            return check_imp(inst, out)
        if axiom is Axiom.IR:
            return check_ir(inst, out)
        if axiom is Axiom.EXH:
            return check_exh(inst, out)
        if axiom is Axiom.CORE:
            return check_core(inst, out, caps)
        if axiom is Axiom.PROP:
            return check_prop(inst, out)
        return check_po_family(inst, out, axiom, caps)
    except CapacityError as exc:
        return AxiomReport(axiom, None, {"reason": str(exc)})


def cmd_solve(args):
    inst = parse_instance(_load_json(args.instance))
    deadline = None
    if args.time_budget is not None:
        deadline = time.monotonic() + args.time_budget
    result = solve(inst, args.rule, caps=args.caps, deadline=deadline)
    doc = result.to_dict(inst)
    _emit(doc, _pretty_result(doc), args)
    return 0


def cmd_check(args):
    inst = parse_instance(_load_json(args.instance))
    out, _ = parse_outcome(_load_json(args.outcome))
    for c in sorted(out.funded):
        inst.project_index(c)
    for agent in sorted(out.charges):
        inst.agent_index(agent)
    if args.axioms is None:
        reports = check_all(inst, out, caps=args.caps)
    else:
        reports = [_run_one_axiom(inst, out, axiom, args.caps) for axiom in args.axioms]
    docs = [report.to_dict() for report in reports]
    _emit(docs, _pretty_reports(docs), args)
    return 0


def cmd_construct(args):
    inst = parse_instance(_load_json(args.instance))
    result = construct_imp_ir_poimp(inst, caps=args.caps)
    doc = result.to_dict(inst)
    _emit(doc, _pretty_result(doc), args)
    return 0


def cmd_gen(args):
    regime = REGIMES[args.regime]
    base = args.seed
    if base is None:
        base = int(os.environ.get("PFC_SEED", "0"))
    os.makedirs(args.out_dir, exist_ok=True)
    paths = []
    for seed in range(base, base + args.count):
        inst = generate(regime, seed)
        path = os.path.join(args.out_dir, "%s-%d.json" % (regime.name, seed))
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(instance_to_dict(inst), handle, indent=2)
            handle.write("\n")
        paths.append(path)
    _emit(paths, paths, args)
    return 0


def cmd_experiment(args):
    names = ("sharehouse", "crowdfunding") if args.regime == "both" else (args.regime,)
    progress = None
    if not args.quiet:
        progress = lambda regime, seed: print(
            "%s seed %d done" % (regime, seed), file=sys.stderr
        )
    records = []
    for name in names:
        records.extend(
            run_batch(
                REGIMES[name],
                args.seeds,
                rules=args.rules,
                time_budget=args.time_budget,
                caps=args.caps,
                progress=progress,
            )
        )
    write_records(args.out, records)
    doc = {"records": args.out, "rows": len(records), "summary": None}
    if args.summary is not None:
        write_summary(args.summary, summarize(records))
        doc["summary"] = args.summary
    _emit(doc, ["%s  %s" % (k, v) for k, v in doc.items()], args)
    return 0


def cmd_feasible(args):
    inst = parse_instance(_load_json(args.instance))
    if args.set is not None:
        ids = [part for part in args.set.split(",") if part]
        for c in ids:
            inst.project_index(c)
        funded = frozenset(ids)
        doc = {"constraint": args.constraint.value, "set": sorted(funded)}
        if args.constraint is Constraint.NONE:
            doc["feasible"] = is_affordable_set(inst, funded)
        elif args.constraint is Constraint.MR:
            ok, charges = is_mr_feasible_set(inst, funded)
            doc["feasible"] = ok
            if ok:
                doc["charges"] = charges
        else:
            cert = implementability_certificate(inst, funded)
            doc["feasible"] = cert.ok
            if cert.ok:
                doc["payments"] = {
                    agent: dict(sorted(row.items()))
                    for agent, row in sorted(cert.payments.entries.items())
                }
            else:
                doc["witness"] = cert.witness
        lines = ["%s  %s" % (key, json.dumps(value)) for key, value in doc.items()]
        _emit(doc, lines, args)
        return 0
    sets = [sorted(s) for s in enumerate_feasible_sets(inst, args.constraint, args.caps)]
    doc = {"constraint": args.constraint.value, "count": len(sets), "sets": sets}
    lines = ["{%s}" % ",".join(s) for s in sets]
    _emit(doc, lines, args)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="pfc",
        description="Exact solver and axiom checkers for participatory funding.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    def common(sub):
        sub.add_argument(
            "--caps",
            type=_caps_arg,
            default=DEFAULT_CAPS,
            metavar="n=16,m=24",
            help="enumeration limits",
        )
        sub.add_argument(
            "--pretty", action="store_true", help="aligned tables instead of JSON"
        )

    sub = subs.add_parser("solve", help="run one rule on an instance")
    sub.add_argument("instance", help="instance JSON path, or - for stdin")
    sub.add_argument("--rule", type=_rule_arg, required=True, metavar="RULE")
    sub.add_argument("--time-budget", type=float, default=None, metavar="SECONDS")
    common(sub)
    sub.set_defaults(func=cmd_solve)

    sub = subs.add_parser("check", help="verify axioms for an outcome")
    sub.add_argument("instance")
    sub.add_argument("outcome")
    sub.add_argument(
        "--axioms", type=_axioms_arg, default=None, metavar="MR,IMP,...",
        help="comma list; default checks all",
    )
    common(sub)
    sub.set_defaults(func=cmd_check)

    sub = subs.add_parser(
        "construct",
        help="build an implementable, individually rational outcome",
    )
    sub.add_argument("instance")
    common(sub)
    sub.set_defaults(func=cmd_construct)

    sub = subs.add_parser("gen", help="generate benchmark instances")
    sub.add_argument("--regime", choices=sorted(REGIMES), required=True)
    sub.add_argument(
        "--seed", type=int, default=None,
        help="base seed; defaults to PFC_SEED or 0",
    )
    sub.add_argument("--count", type=int, default=1)
    sub.add_argument("--out-dir", default=".")
    common(sub)
    sub.set_defaults(func=cmd_gen)

    sub = subs.add_parser("experiment", help="run the price-of-fairness experiment")
    sub.add_argument(
        "--regime", choices=sorted(REGIMES) + ["both"], default="both"
    )
    sub.add_argument(
        "--seeds", type=_seeds_arg, default=range(200), metavar="COUNT|LO:HI|LIST"
    )
    sub.add_argument(
        "--rules", type=_rules_arg, default=ALL_RULES, metavar="RULE,RULE,..."
    )
    sub.add_argument("--out", required=True, metavar="RECORDS_CSV")
    sub.add_argument("--summary", default=None, metavar="SUMMARY_CSV")
    sub.add_argument("--time-budget", type=float, default=60.0, metavar="SECONDS")
    sub.add_argument("--quiet", action="store_true")
    common(sub)
    sub.set_defaults(func=cmd_experiment)

    sub = subs.add_parser("feasible", help="enumerate or test feasible sets")
    sub.add_argument("instance")
    sub.add_argument(
        "--constraint", type=_constraint_arg, default=Constraint.NONE,
        metavar="NONE|MR|IMP",
    )
    sub.add_argument(
        "--set", default=None, metavar="A,B",
        help="test one set instead of enumerating",
    )
    common(sub)
    sub.set_defaults(func=cmd_feasible)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PfcError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
