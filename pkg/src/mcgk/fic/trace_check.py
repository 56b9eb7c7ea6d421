"""Independent re-validation of proof traces.

Shares no code with the prover's rule generation: each node is checked
against the rule's shape directly, leaves are looked up in the knowledge
base again, and the DAG is checked for cycles.
"""
from __future__ import annotations

from .engine import FREE_KINDS, RULES, ProofTrace, lift_kind
from .groups import Group, structurally_finite
from .kb import KnowledgeBase


class TraceError(ValueError):
    pass


def _is(fact, pred, n=None):
    return fact.pred == pred and (n is None or len(fact.args) == n)


def _pmcg(g):
    return isinstance(g, Group) and g.ctor == "PureMCG"


def _one_rewrite(x: Group, y: Group, a: Group, b: Group) -> bool:
    """True if y is x with exactly one subterm a replaced by b."""
    if x == a and y == b:
        return True
    if x.ctor != y.ctor or len(x.args) != len(y.args):
        return False
    diff = [k for k, (u, v) in enumerate(zip(x.args, y.args)) if u != v]
    if len(diff) != 1:
        return False
    u, v = x.args[diff[0]], y.args[diff[0]]
    return isinstance(u, Group) and isinstance(v, Group) and _one_rewrite(u, v, a, b)


def _check_r6(c, ps) -> bool:
    if len(ps) != 2 or not (_is(ps[0], "FIC") and _is(ps[1], "SES")):
        return False
    g, below = c.args[0], ps[0].args[0]
    k, total, quotient = ps[1].args
    if not (_pmcg(g) and _pmcg(below) and total == g and quotient == below):
        return False
    if ps[1].kind not in FREE_KINDS or not ps[1].realizable:
        return False
    gg, r, i = g.args
    pg, pr, pi = below.args
    if 2 * pg + pr + pi <= 2 or pr + pi <= 0 or pg != gg:
        return False
    return (pr, pi) in ((r, i - 1), (r - 1, i + 1))


def _check_node(c, ps, rule, kb: KnowledgeBase) -> bool:
    if rule == "KB":
        return not ps and kb.lookup(c, route="*") is not None
    if rule == "AXIOM":
        g = c.args[0]
        if ps:
            return False
        if c.pred == "Finite":
            return g.ctor not in ("Product", "Power", "Wreath") and structurally_finite(g)
        if c.pred == "SPF":
            return (g.ctor in ("FreeGroup", "Trivial")
                    or (g.ctor == "FreeAbelian" and g.args[0] <= 1))
        return False
    if rule == "FIN":
        g = c.args[0]
        return (_is(c, "Finite") and g.ctor in ("Product", "Power", "Wreath")
                and list(ps) == [type(c)("Finite", (a,)) for a in g.args])
    if rule == "R11":
        g = c.args[0]
        if not _is(c, "SPF"):
            return False
        if g.ctor == "Product":
            return list(ps) == [type(c)("SPF", (a,)) for a in g.args]
        if g.ctor == "Power":
            return list(ps) == [type(c)("SPF", (g.args[0],)), type(c)("Finite", (g.args[1],))]
        return False
    if rule == "R12":
        if len(ps) != 2 or not _is(ps[0], "Isomorphic", 2):
            return False
        a, b = ps[0].args
        x, y = c.args[0], ps[1].args[0]
        return (ps[1].pred == c.pred and len(c.args) == 1
                and (_one_rewrite(x, y, a, b) or _one_rewrite(x, y, b, a)))
    if rule == "WL":
        if not (_is(c, "SES") and len(ps) == 1 and _is(ps[0], "SES")):
            return False
        pk, pt, pq = c.args
        k, g, p = ps[0].args
        return (pt.ctor == "Wreath" and pk == Group("Power", (k, pt.args[1])) and pt.args[0] == g
                and pq == Group("Wreath", (p, pt.args[1]))
                and c.kind == lift_kind(ps[0].kind) and c.realizable == ps[0].realizable)
    if rule == "R8":
        if not (_is(c, "Subgroup") and len(ps) == 2 and _is(ps[0], "SES") and _is(ps[1], "Finite")):
            return False
        h, w = c.args
        k, total, q = ps[0].args
        return total == h and w == Group("Wreath", (k, q)) and ps[1].args[0] == q
    if rule == "WN":
        if not (_is(c, "Subgroup") and len(ps) == 2):
            return False
        h, w = c.args
        if h.ctor != "Wreath" or h.args[0].ctor != "Power":
            return False
        (k, q), p = h.args[0].args, h.args[1]
        return (w == Group("Wreath", (k, Group("Product", (p, q))))
                and list(ps) == [type(c)("Finite", (p,)), type(c)("Finite", (q,))])

    # remaining rules conclude FIC(G)
    if not _is(c, "FIC"):
        return False
    g = c.args[0]
    if rule == "R0":
        return list(ps) == [type(c)("Finite", (g,))]
    if rule == "R2":
        return (len(ps) == 2 and _is(ps[0], "Subgroup") and ps[0].args[0] == g
                and _is(ps[1], "FIC") and ps[1].args[0] == ps[0].args[1])
    if rule in ("R5", "R4", "R4'"):
        if not (len(ps) == 2 and _is(ps[0], "SES") and _is(ps[1], "FIC")):
            return False
        k, total, q = ps[0].args
        if total != g or ps[1].args[0] != q:
            return False
        if rule == "R5":
            return ps[0].kind == "finite"
        kinds = FREE_KINDS if rule == "R4" else ("surface",)
        return ps[0].kind in kinds and bool(ps[0].realizable)
    if rule == "R3":
        if len(ps) == 1:
            return _is(ps[0], "SPF") and ps[0].args[0] == g
        if len(ps) != 3 or not _is(ps[0], "SES"):
            return False
        k, total, q = ps[0].args
        return (total == g and _is(ps[1], "SPF") and ps[1].args[0] == k
                and _is(ps[2], "Finite") and ps[2].args[0] == q)
    if rule == "R6":
        return _check_r6(c, ps)
    if rule == "R9":
        return (_pmcg(g) and g.args[0] == 0 and g.args[2] == 0 and g.args[1] >= 1 and len(ps) == 2
                and _is(ps[0], "Isomorphic") and ps[0].args[0] == g
                and _is(ps[1], "FIC") and ps[1].args[0] == ps[0].args[1])
    if rule == "R10":
        return (_pmcg(g) and g.args[0] >= 2 and (g.args[1], g.args[2]) != (0, 0)
                and list(ps) == [type(c)("FIC", (Group("PureMCG", (g.args[0], 0, 0)),))])
    if rule == "R7":
        return (g.ctor == "Wreath" and _pmcg(g.args[0]) and g.args[0].args[:2] == (0, 0)
                and list(ps) == [type(c)("Finite", (g.args[1],))])
    if rule == "R7b":
        if g.ctor != "Wreath" or not _pmcg(g.args[0]) or len(ps) != 3:
            return False
        inner, q = g.args
        gg, r, i = inner.args
        below = Group("PureMCG", (gg, r, i - 1))
        ses = ps[1]
        return (i >= 1 and ps[0] == type(c)("FIC", (Group("Wreath", (below, q)),))
                and _is(ses, "SES") and ses.args[1] == inner and ses.args[2] == below
                and ses.kind in ("f.g.-free", "surface") and bool(ses.realizable)
                and ps[2] == type(c)("Finite", (q,)))
    return False


def check_trace(trace: ProofTrace, kb: KnowledgeBase) -> None:
    """Raise TraceError on the first unsound, cyclic or dangling node."""
    if trace.root.fact != trace.goal:
        raise TraceError(f"root proves {trace.root.fact}, goal was {trace.goal}")
    if not trace.is_acyclic():
        raise TraceError("proof graph has a cycle")
    conclusions = {}
    for node in trace.nodes():
        prev = conclusions.setdefault(node.fact, node)
        if prev is not node and (prev.rule, prev.premises) != (node.rule, node.premises):
            raise TraceError(f"{node.fact} is justified twice in different ways")
        if node.rule not in RULES or node.rule == "R1":
            raise TraceError(f"unknown or forbidden rule {node.rule} at {node.fact}")
        for p in node.premises:
            if p.fact not in conclusions:
                raise TraceError(f"premise {p.fact} of {node.fact} is not discharged before use")
        if not _check_node(node.fact, [p.fact for p in node.premises], node.rule, kb):
            raise TraceError(f"{node.rule} does not justify {node.fact} from "
                             + ", ".join(str(p.fact) for p in node.premises))
