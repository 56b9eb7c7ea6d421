"""Backward-chaining prover for "FIC holds" with iterative deepening.

Every proof is a DAG whose leaves are knowledge-base facts or structural
axioms and whose internal nodes each instantiate one closure rule. The
engine never claims FIC fails; running out of depth is reported as such.

Quotient lifting over all virtually cyclic subgroups is not applied as a
raw rule since it is not finitely checkable; only its packaged corollaries
below are.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .groups import (
    FIC,
    SPF,
    Fact,
    Finite,
    Group,
    SES,
    Subgroup,
    structurally_finite,
)
from .kb import KnowledgeBase

DEFAULT_DEPTH = 64
MAX_TERM_SIZE = 48

RULES = {
    "KB": ("knowledge-base fact", "see fact citation"),
    "AXIOM": ("structural axiom", "finite or free by construction"),
    "R0": ("virtually cyclic groups",
           "FIC holds trivially for finite groups, which are virtually cyclic [FJ]"),
    "R1": ("quotient lifting", "[FJ]; never applied directly"),
    "R2": ("subgroup inheritance", "FIC passes to subgroups [FJ]"),
    "R3": ("finite extension of a strongly poly-free group",
           "finite extensions of strongly poly-free groups [FR]"),
    "R4": ("free-kernel extension",
           "f.g. free kernel with geometrically realizable lifts, FIC for the quotient [FJ], [FR]"),
    "R4'": ("surface-kernel extension",
            "surface-group kernel version via strongly poly-surface groups [R]"),
    "R5": ("finite-kernel extension", "finite kernel, FIC for the quotient [FJ]"),
    "R6": ("puncture/boundary induction",
           "Birman exact sequences [H] with the free-kernel extension theorem"),
    "R7": ("genus-0 wreath products", "FIC for Gamma_0^i wr Q, Q finite, by induction on i [FR]"),
    "R7b": ("wreath induction along the Birman sequence",
            "coordinatewise free or surface kernels in K^|Q| [FR]"),
    "R8": ("wreath embedding", "G embeds in K wr Q for 1 -> K -> G -> Q -> 1, Q finite [DM]"),
    "R9": ("genus-0 bounded surfaces", "Gamma_{0,r}^0 = P_{r-1} x Z^{r-1} [Bi, H] with [AFR]"),
    "R10": ("genus >= 2 bootstrap",
            "closed-surface Birman sequence then puncture/boundary induction [H], [R]"),
    "R11": ("products of strongly poly-free groups", "finite products stay strongly poly-free [FR]"),
    "R12": ("isomorphism transport", "predicates are invariant under isomorphism"),
    "FIN": ("finite constructions", "products, powers and wreath products of finite groups are finite"),
    "WL": ("wreath lifting of an extension",
           "1 -> K^|Q| -> G wr Q -> P wr Q -> 1 from 1 -> K -> G -> P -> 1 [FR]"),
    "WN": ("wreath nesting", "K^|Q| wr P embeds in K wr (P x Q) [FR]"),
}

FREE_KINDS = ("f.g.-free", "infinite-cyclic")


def lift_kind(kind: str) -> str:
    if kind == "finite":
        return "finite"
    if kind in FREE_KINDS or kind == "SPF":
        return "SPF"
    return "general"


@dataclass(frozen=True)
class Node:
    fact: Fact
    rule: str
    premises: tuple["Node", ...] = ()
    cite: str = ""
    height: int = 0


def _node(fact: Fact, rule: str, premises=(), cite: str = "") -> Node:
    h = 1 + max((p.height for p in premises), default=-1) if premises else 0
    return Node(fact, rule, tuple(premises), cite or RULES[rule][1], h)


class ProofTrace:
    """Proof DAG rooted at the goal; nodes are shared by fact."""

    def __init__(self, root: Node, goal: Fact):
        self.root = root
        self.goal = goal

    def nodes(self) -> list[Node]:
        """Topologically sorted nodes (premises before conclusions), deduplicated by fact."""
        seen, order = set(), []

        def visit(n: Node):
            if n.fact in seen:
                return
            seen.add(n.fact)  # before recursing, so a malformed cyclic graph terminates
            for p in n.premises:
                visit(p)
            order.append(n)

        visit(self.root)
        return order

    def edges(self) -> dict:
        return {n.fact: [p.fact for p in n.premises] for n in self.nodes()}

    def is_acyclic(self) -> bool:
        graph = self.edges()
        state: dict = {}

        def dfs(f) -> bool:
            state[f] = 1
            for p in graph.get(f, ()):
                s = state.get(p, 0)
                if s == 1 or (s == 0 and not dfs(p)):
                    return False
            state[f] = 2
            return True

        return all(state.get(f) == 2 or dfs(f) for f in graph)

    @property
    def depth(self) -> int:
        return self.root.height

    def rules_used(self) -> list[str]:
        return sorted({n.rule for n in self.nodes()})

    def to_json(self) -> dict:
        nodes = self.nodes()
        ids = {n.fact: k for k, n in enumerate(nodes)}
        return {
            "goal": str(self.goal),
            "depth": self.depth,
            "nodes": [
                {"id": ids[n.fact], "fact": str(n.fact), "rule": n.rule,
                 "rule_name": RULES[n.rule][0], "cite": n.cite,
                 "premises": [ids[p.fact] for p in n.premises]}
                for n in nodes
            ],
            "root": ids[self.root.fact],
        }


def explain(trace: ProofTrace, as_json: bool = False):
    """Render a derivation, premises first; ``as_json`` returns the DAG as a dict."""
    if as_json:
        return trace.to_json()
    nodes = trace.nodes()
    if len(nodes) == 1:
        n = nodes[0]
        return f"{n.fact}  [{n.rule}: {n.cite}]"
    ids = {n.fact: k + 1 for k, n in enumerate(nodes)}
    width = len(str(len(nodes)))
    lines = []
    for n in nodes:
        head = f"[{ids[n.fact]:>{width}}] {n.fact}"
        if n.premises:
            refs = ", ".join(f"[{ids[p.fact]}]" for p in n.premises)
            lines.append(f"{head}\n{' ' * (width + 3)}by {n.rule} ({RULES[n.rule][0]}; {n.cite}) from {refs}")
        else:
            lines.append(f"{head}\n{' ' * (width + 3)}{n.rule}: {n.cite}")
    return "\n".join(lines)


class DerivationFailure(Exception):
    """No proof within the depth limit. Not a disproof."""

    def __init__(self, goal: Fact, depth_limit: int, unprovable, exhausted: bool):
        self.goal = goal
        self.depth_limit = depth_limit
        self.unprovable = list(unprovable)
        self.exhausted = exhausted  # True if the depth bound cut the search
        why = "depth limit reached" if exhausted else "search space exhausted"
        super().__init__(f"could not derive {goal} ({why}); unprovable subgoals: "
                         + ", ".join(str(f) for f in self.unprovable))

    def to_json(self) -> dict:
        return {"goal": str(self.goal), "depth_limit": self.depth_limit,
                "depth_exhausted": self.exhausted,
                "unprovable_subgoals": [str(f) for f in self.unprovable]}


class _Prover:
    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self.success: dict = {}
        self.failed: dict = {}  # fact -> largest depth known to fail
        self.stack: dict = {}
        self.low = math.inf
        self.cutoff = False
        self.dead_ends: dict = {}  # failed fact -> distance from root
        self._rules: dict = {}  # fact -> candidate list; the KB is fixed during a search

    # -- search core --

    def prove(self, fact: Fact, depth: int) -> Node | None:
        hit = self.success.get(fact)
        if hit is not None and hit.height <= depth:
            return hit
        if depth < 0:
            self.cutoff = True
            return None
        if self.failed.get(fact, -1) >= depth:
            return None
        if fact in self.stack:
            self.low = min(self.low, self.stack[fact])
            return None
        if any(isinstance(a, Group) and a.size() > MAX_TERM_SIZE for a in fact.args):
            return None
        idx = len(self.stack)
        self.stack[fact] = idx
        saved_low, self.low = self.low, math.inf
        found = None
        try:
            rules = self._rules.get(fact)
            if rules is None:
                rules = self._rules[fact] = list(self.candidates(fact))
            for rule, premises, cite in rules:
                if not premises:
                    found = _node(fact, rule, (), cite)
                    break
                if depth == 0:
                    self.cutoff = True
                    continue
                proved = []
                for p in premises:
                    node = self.prove(p, depth - 1)
                    if node is None:
                        break
                    proved.append(node)
                else:
                    found = _node(fact, rule, proved, cite)
                    break
        finally:
            del self.stack[fact]
        cycle_free = self.low >= idx
        self.low = min(saved_low, self.low if not cycle_free else math.inf)
        if found is not None:
            self.success[fact] = found
            return found
        if cycle_free:
            self.failed[fact] = max(self.failed.get(fact, -1), depth)
        self.dead_ends.setdefault(fact, idx)
        return None

    # -- rule candidates, in fixed order --

    def candidates(self, fact: Fact):
        kb = self.kb
        if fact.pred != "SES":
            s = kb.lookup(fact, route="*") if fact.pred == "Isomorphic" else kb.lookup(fact)
            if s is not None:
                yield "KB", (), s.cite
                return
        handler = getattr(self, f"_cand_{fact.pred}", None)
        if handler is not None:
            yield from handler(fact)

    def _cand_SES(self, fact: Fact):
        s = self.kb.lookup(fact, route="*")
        if s is not None:
            yield "KB", (), s.cite
            return
        kernel, total, quotient = fact.args
        if (total.ctor == "Wreath" and kernel.ctor == "Power" and quotient.ctor == "Wreath"
                and kernel.args[1] == total.args[1] == quotient.args[1]):
            for inner, _ in self.kb.ses_with_total(total.args[0], route="*"):
                if (inner.args[0] == kernel.args[0] and inner.args[2] == quotient.args[0]
                        and lift_kind(inner.kind) == fact.kind and inner.realizable == fact.realizable):
                    yield "WL", (inner,), ""

    def ses_for(self, total: Group, route: str | None = None):
        """Concrete extensions with the given total group: KB instances, then wreath lifts."""
        out = [inst for inst, _ in self.kb.ses_with_total(total, route)]
        if total.ctor == "Wreath":
            inner_total, q = total.args
            for inner in self.ses_for(inner_total, route):
                k, _, p = inner.args
                out.append(SES(Group("Power", (k, q)), total, Group("Wreath", (p, q)),
                               lift_kind(inner.kind), inner.realizable))
        return out

    def supergroups(self, h: Group):
        out = [inst.args[1] for inst, _ in self.kb.supergroups(h)]
        for ses in self.ses_for(h, route="*"):
            k, _, q = ses.args
            out.append(Group("Wreath", (k, q)))
        if h.ctor == "Wreath" and h.args[0].ctor == "Power":
            k, q = h.args[0].args
            out.append(Group("Wreath", (k, Group("Product", (h.args[1], q)))))
        return out

    def iso_rewrites(self, g: Group, route: str | None = None):
        for path, sub in g.subterms():
            for iso, image, _ in self.kb.iso_images(sub, route):
                yield iso, g.replace_at(path, image)

    def _cand_FIC(self, fact: Fact):
        g = fact.args[0]
        yield "R0", (Finite(g),), ""
        for sup in self.supergroups(g):
            yield "R2", (Subgroup(g, sup), FIC(sup)), ""
        sess = self.ses_for(g)
        for ses in sess:
            if ses.kind == "finite":
                yield "R5", (ses, FIC(ses.args[2])), ""
        yield "R3", (SPF(g),), ""
        for ses in sess:
            yield "R3", (ses, SPF(ses.args[0]), Finite(ses.args[2])), ""
        for ses in sess:
            if ses.kind in FREE_KINDS and ses.realizable:
                yield "R4", (ses, FIC(ses.args[2])), ""
        for ses in sess:
            if ses.kind == "surface" and ses.realizable:
                yield "R4'", (ses, FIC(ses.args[2])), ""
        if g.ctor == "PureMCG":
            yield from self._r6(g)
        for iso, image in self.iso_rewrites(g):
            yield "R12", (iso, FIC(image)), ""
        if g.ctor == "PureMCG" and g.args[0] == 0 and g.args[2] == 0 and g.args[1] >= 1:
            for iso, image, _ in self.kb.iso_images(g, route="R9"):
                yield "R9", (iso, FIC(image)), ""
        if g.ctor == "PureMCG" and g.args[0] >= 2 and (g.args[1], g.args[2]) != (0, 0):
            yield "R10", (FIC(Group("PureMCG", (g.args[0], 0, 0))),), ""
        if g.ctor == "Wreath":
            inner, q = g.args
            if inner.ctor == "PureMCG" and inner.args[0] == 0 and inner.args[1] == 0:
                yield "R7", (Finite(q),), ""
            if inner.ctor == "PureMCG" and inner.args[2] >= 1:
                gg, r, i = inner.args
                below = Group("PureMCG", (gg, r, i - 1))
                for ses in self.ses_for(inner, route="R6"):
                    if (ses.args[2] == below and ses.realizable
                            and ses.kind in ("f.g.-free", "surface")):
                        yield "R7b", (FIC(Group("Wreath", (below, q))), ses, Finite(q)), ""

    def _r6(self, g: Group):
        gg, r, i = g.args
        preds = []
        if i >= 1:
            p = (gg, r, i - 1)
            preds.append(p)
        if r >= 1:
            preds.append((gg, r - 1, i + 1))
        for pg, pr, pi in preds:
            if 2 * pg + pr + pi > 2 and pr + pi > 0:
                below = Group("PureMCG", (pg, pr, pi))
                for ses in self.ses_for(g, route="R6"):
                    if ses.args[2] == below and ses.kind in FREE_KINDS and ses.realizable:
                        yield "R6", (FIC(below), ses), ""

    def _cand_Finite(self, fact: Fact):
        g = fact.args[0]
        if g.ctor in ("Product", "Power", "Wreath"):
            yield "FIN", tuple(Finite(a) for a in g.args), ""
        elif structurally_finite(g):
            yield "AXIOM", (), "finite by construction"
        for iso, image in self.iso_rewrites(g):
            yield "R12", (iso, Finite(image)), ""

    def _cand_SPF(self, fact: Fact):
        g = fact.args[0]
        if g.ctor == "FreeGroup" or (g.ctor == "FreeAbelian" and g.args[0] <= 1) or g.ctor == "Trivial":
            yield "AXIOM", (), "finitely generated free groups are strongly poly-free [AFR]"
        elif g.ctor == "Product":
            yield "R11", tuple(SPF(a) for a in g.args), ""
        elif g.ctor == "Power":
            yield "R11", (SPF(g.args[0]), Finite(g.args[1])), ""
        for iso, image in self.iso_rewrites(g):
            yield "R12", (iso, SPF(image)), ""

    def _cand_Subgroup(self, fact: Fact):
        h, sup = fact.args
        if sup.ctor == "Wreath":
            k, q = sup.args
            for ses in self.ses_for(h, route="*"):
                if ses.args[0] == k and ses.args[2] == q:
                    yield "R8", (ses, Finite(q)), ""
            if (h.ctor == "Wreath" and h.args[0].ctor == "Power" and q.ctor == "Product"
                    and len(q.args) == 2 and h.args[0].args[0] == k
                    and q.args == (h.args[1], h.args[0].args[1])):
                yield "WN", (Finite(q.args[0]), Finite(q.args[1])), ""


def derive(goal: Fact, kb: KnowledgeBase, depth_limit: int = DEFAULT_DEPTH) -> ProofTrace:
    """Find the shallowest proof of ``goal`` (ties broken by rule order).

    Raises DerivationFailure when no proof exists within ``depth_limit``.
    """
    if goal.pred != "FIC":
        raise ValueError("goals must be FIC(...) facts")
    if depth_limit < 1:
        raise ValueError("depth_limit must be >= 1")
    prover = _Prover(kb)
    for depth in range(depth_limit + 1):
        prover.cutoff = False
        prover.failed.clear()
        prover.dead_ends.clear()
        node = prover.prove(goal, depth)
        if node is not None:
            return ProofTrace(node, goal)
        if not prover.cutoff:
            break
    dead = prover.dead_ends
    if dead:
        far = max(dead.values())
        unprovable = [f for f, d in dead.items() if d == far]
    else:
        unprovable = [goal]
    raise DerivationFailure(goal, depth_limit, unprovable, prover.cutoff)


def trace_json(trace: ProofTrace) -> str:
    return json.dumps(trace.to_json(), indent=2)
