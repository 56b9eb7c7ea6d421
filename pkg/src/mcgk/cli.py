"""mcgk command line: torsion, virtually cyclic shapes, lower K-theory and FIC derivations.

Exit codes: 0 success, 1 domain failure (e.g. no derivation found),
2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import klower, mcg_torsion, surface_actions
from .fic import engine
from .fic.groups import FIC, Group, ParseError, parse_fact, parse_group
from .fic.kb import KBError, load_kb
from .fic.trace_check import TraceError, check_trace

SCHEMA_VERSION = "1.0"


class UsageError(Exception):
    pass


def _report(command: str, inputs: dict, result: dict, citations=()) -> dict:
    seen = []
    for c in citations:
        if c and c not in seen:
            seen.append(c)
    return {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs,
            "result": result, "citations": seen}


def _orders(text: str) -> list[int]:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    return out


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _load(path):
    try:
        return load_kb(path)
    except KBError as exc:
        raise UsageError(str(exc)) from None


# --- subcommands: each returns (exit code, report, text) -----------------------

def cmd_rh_enumerate(args):
    data = surface_actions.enumerate_branch_data(args.genus, args.order)
    rows = []
    for d in data:
        row = d.to_dict()
        row["harvey"] = surface_actions.harvey_filter(d)
        row["realizable"] = surface_actions.is_realizable(d, args.max_order)
        rows.append(row)
    ks = [k for k in range(2, args.order + 1) if args.order % k == 0]
    result = {"divisors": ks, "data": rows,
              "max_fixed_points": surface_actions.max_full_order_fixed_points(args.genus, args.order,
                                                                            args.max_order)}
    lines = [f"Z/{args.order} actions on genus {args.genus}: {len(rows)} branch datum(s)"]
    if rows:
        lines.append("  h  " + " ".join(f"a_{k}" for k in ks) + "  realizable")
        for r in rows:
            lines.append(f"  {r['h']}  " + " ".join(f"{r['counts'][str(k)]:>{len(str(k)) + 2}}" for k in ks)
                         + f"  {'yes' if r['realizable'] else 'no'}")
    lines.append(f"most fixed points of order {args.order} in a realizable action: "
                 f"{result['max_fixed_points']}")
    return 0, _report("rh-enumerate", {"genus": args.genus, "order": args.order}, result), "\n".join(lines)


def cmd_realize(args):
    inputs = {"order": args.order, "quotient_genus": args.quotient_genus, "periods": args.periods}
    try:
        datum = surface_actions.BranchDatum.from_orders(args.order, args.quotient_genus, args.periods)
    except ValueError as exc:
        result = {"valid": False, "error": str(exc), "realizable": False}
        return 1, _report("realize", inputs, result), f"invalid branch datum: {exc}"
    vecs = surface_actions.find_generating_vectors(datum, args.max_order, first_only=True)
    result = {"valid": True, "datum": datum.to_dict(), "realizable": bool(vecs),
              "harvey": surface_actions.harvey_filter(datum),
              "generating_vector": list(vecs[0].elements) if vecs else None}
    text = f"genus {datum.g} surface, Z/{args.order} with quotient genus {args.quotient_genus}, " \
           f"periods {list(datum.orders)}: "
    text += f"realizable, generating vector {list(vecs[0].elements)}" if vecs else "not realizable"
    return 0, _report("realize", inputs, result), text


def cmd_torsion(args):
    tr = mcg_torsion.torsion_result(args.genus, args.punctures, args.max_order)
    result = {"orders": tr.sorted_orders(), "caveat": tr.caveat}
    lines = [f"torsion orders in pure mapping class group genus {args.genus}, "
             f"{args.punctures} puncture(s): {{{', '.join(map(str, tr.sorted_orders()))}}}"]
    if tr.caveat:
        lines.append(f"caveat: {tr.caveat}")
    if args.explain and args.genus > 0:
        reports = [mcg_torsion.exclusion_report(args.genus, n, args.punctures, args.max_order)
                   for n in range(2, mcg_torsion.max_torsion_order(args.genus) + 1)]
        result["explanations"] = [r.to_dict() for r in reports]
        lines += [r.describe() for r in reports]
    inputs = {"genus": args.genus, "punctures": args.punctures}
    return 0, _report("torsion", inputs, result), "\n".join(lines)


def _group_facts(args):
    kb = _load(args.facts if getattr(args, "facts", None) else args.kb if getattr(args, "kb", None) else None)
    return kb, mcg_torsion.facts_from_rows(kb.group_facts, args.genus, args.punctures, args.profile or ())


def _facts_cites(facts):
    cites = [facts.central_involution_cite] if facts.central_involution else []
    return cites + [n.cite for n in facts.normalizers] + [e.cite for e in facts.exclusions]


def cmd_vc_list(args):
    _, facts = _group_facts(args)
    cls = mcg_torsion.classify_vc_shapes(args.genus, args.punctures, facts, args.max_order)
    result = cls.to_dict()
    lines = [f"virtually cyclic shapes in genus {args.genus}, {args.punctures} puncture(s):",
             "  {" + ", ".join(s.label for s in cls.kept) + "}"]
    for s, c in cls.pruned:
        lines.append(f"  pruned {s.label}: {c}")
    if cls.caveat:
        lines.append(f"caveat: {cls.caveat}")
    inputs = {"genus": args.genus, "punctures": args.punctures, "facts": args.facts,
              "profiles": list(args.profile or ())}
    return 0, _report("vc-list", inputs, result, [c for _, c in cls.pruned]), "\n".join(lines)


def cmd_k_report(args):
    kb, facts = _group_facts(args)
    table = klower.FactTable.from_dicts(kb.k_table, kb.nil_vanishing)
    goal = FIC(Group("PureMCG", (args.genus, 0, args.punctures)))
    try:
        trace = engine.derive(goal, kb)
        derived = True
    except engine.DerivationFailure:
        trace, derived = None, False
    rep = klower.vanishing_report(args.genus, args.punctures, facts, table, fic_derived=derived)
    result = rep.to_json()
    result["fic_rules"] = trace.rules_used() if trace else []
    cites = [e.cite for _, e in rep.profile.entries] + _facts_cites(facts)
    for _, prof in rep.shapes:
        cites += [e.cite for _, e in prof.entries]
    lines = [f"lower K-theory of pure mapping class group genus {args.genus}, {args.punctures} puncture(s):"]
    for d in klower.DEGREES:
        lines.append(f"  {klower.DEGREE_NAMES[d]:>5} = {rep.profile[d]}")
    lines.append(rep.narrative)
    if rep.caveat:
        lines.append(f"caveat: {rep.caveat}")
    inputs = {"genus": args.genus, "punctures": args.punctures, "kb": args.kb}
    return 0, _report("k-report", inputs, result, cites), "\n".join(lines)


def cmd_fic_derive(args):
    kb = _load(args.kb)
    try:
        goal = parse_fact(args.goal) if args.goal.lstrip().startswith("FIC") else FIC(parse_group(args.goal))
    except ParseError as exc:
        raise UsageError(f"cannot parse goal: {exc}") from None
    if goal.pred != "FIC":
        raise UsageError("goal must be an FIC(...) fact or a group expression")
    inputs = {"goal": str(goal), "kb": args.kb, "depth": args.depth}
    try:
        trace = engine.derive(goal, kb, args.depth)
    except engine.DerivationFailure as exc:
        text = (f"no derivation of {goal} found "
                f"({'depth limit reached' if exc.exhausted else 'search space exhausted'}); "
                "this is not a disproof.\ndeepest unprovable subgoals:\n"
                + "\n".join(f"  {f}" for f in exc.unprovable))
        result = {"derived": False, **exc.to_json()}
        return 1, _report("fic-derive", inputs, result), text
    try:
        check_trace(trace, kb)
        checked = True
    except TraceError:
        checked = False
    nodes = trace.nodes()
    result = {"derived": True, "checked": checked, "trace": trace.to_json()}
    text = engine.explain(trace) + f"\n{'trace verified' if checked else 'TRACE CHECK FAILED'}"
    return (0 if checked else 1), _report("fic-derive", inputs, result, [n.cite for n in nodes]), text


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mcgk", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.add_argument("--json", action="store_true", help="emit a JSON report")
        sp.set_defaults(func=fn)
        return sp

    sp = add("rh-enumerate", cmd_rh_enumerate, "enumerate Riemann-Hurwitz branch data for Z/n on a genus-g surface")
    sp.add_argument("--genus", type=_nonneg, required=True)
    sp.add_argument("--order", type=_positive, required=True)
    sp.add_argument("--max-order", type=_positive, default=surface_actions.DEFAULT_MAX_ORDER)

    sp = add("realize", cmd_realize, "test a branch datum for a generating vector")
    sp.add_argument("--order", type=_positive, required=True)
    sp.add_argument("--quotient-genus", type=_nonneg, required=True)
    sp.add_argument("--periods", type=_orders, required=True, help="comma-separated singular orders")
    sp.add_argument("--max-order", type=_positive, default=surface_actions.DEFAULT_MAX_ORDER)

    sp = add("torsion", cmd_torsion, "orders of finite cyclic subgroups of a pure mapping class group")
    sp.add_argument("--genus", type=_nonneg, required=True)
    sp.add_argument("--punctures", type=_nonneg, required=True)
    sp.add_argument("--explain", action="store_true", help="show the per-datum exclusion argument")
    sp.add_argument("--max-order", type=_positive, default=surface_actions.DEFAULT_MAX_ORDER)

    sp = add("vc-list", cmd_vc_list, "candidate virtually cyclic subgroup shapes")
    sp.add_argument("--genus", type=_nonneg, required=True)
    sp.add_argument("--punctures", type=_nonneg, required=True)
    sp.add_argument("--facts", metavar="FILE", help="knowledge-base file with group_facts")
    sp.add_argument("--profile", action="append", metavar="NAME",
                    help="enable an optional fact profile (e.g. sl2z-remark); repeatable")
    sp.add_argument("--max-order", type=_positive, default=surface_actions.DEFAULT_MAX_ORDER)

    sp = add("k-report", cmd_k_report, "lower algebraic K-theory of a pure mapping class group")
    sp.add_argument("--genus", type=_nonneg, required=True)
    sp.add_argument("--punctures", type=_nonneg, required=True)
    sp.add_argument("--kb", metavar="FILE", help="knowledge-base file (default: $MCGK_KB or bundled)")
    sp.add_argument("--profile", action="append", metavar="NAME")

    sp = add("fic-derive", cmd_fic_derive, "derive FIC for a group expression")
    sp.add_argument("--goal", required=True, help='e.g. "FIC(PureMCG(0,2,3))"')
    sp.add_argument("--kb", metavar="FILE")
    sp.add_argument("--depth", type=_positive, default=engine.DEFAULT_DEPTH)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, report, text = args.func(args)
    except UsageError as exc:
        print(f"mcgk: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except (surface_actions.SearchTooLargeError, klower.TableMismatchError) as exc:
        print(f"mcgk: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
