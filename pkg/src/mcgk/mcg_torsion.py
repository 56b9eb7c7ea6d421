"""Finite-order elements and virtually cyclic subgroup shapes of punctured pure MCGs.

A Z/n subgroup of the pure group with i punctures is realized (Nielsen) by a
Z/n action on the closed surface fixing every puncture, so it needs at least
i singular points of full order n. The genus-1 tables are fully supported;
other genera are computed the same way but flagged with a caveat.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from sympy import isprime

from .surface_actions import (
    DEFAULT_MAX_ORDER,
    BranchDatum,
    enumerate_branch_data,
    is_realizable,
    max_full_order_fixed_points,
)

GENUS_CAVEAT = ("only genus 1 is verified; other genera use the same fixed-point "
                "model without independent confirmation")


def required_fixed_points(g: int, i: int) -> int:
    if g == 1:
        return max(i, 1)  # Gamma_1^0 is isomorphic to Gamma_1^1
    return i


def max_torsion_order(g: int) -> int:
    # Wiman's bound for a single periodic map
    return 4 * g + 2


@dataclass(frozen=True)
class TorsionResult:
    g: int
    i: int
    orders: frozenset
    caveat: str | None = None

    def sorted_orders(self) -> list[int]:
        return sorted(self.orders)


def torsion_result(g: int, i: int, max_order: int = DEFAULT_MAX_ORDER) -> TorsionResult:
    if g < 0 or i < 0:
        raise ValueError("genus and punctures must be non-negative")
    if g == 0:
        # pure genus-0 groups are trivial or torsion-free
        return TorsionResult(g, i, frozenset({1}), "genus 0: pure groups are torsion-free")
    need = required_fixed_points(g, i)
    found = {1}
    for n in range(2, max_torsion_order(g) + 1):
        if need == 0:
            if any(is_realizable(d, max_order) for d in enumerate_branch_data(g, n)):
                found.add(n)
        elif max_full_order_fixed_points(g, n, max_order) >= need:
            found.add(n)
    return TorsionResult(g, i, frozenset(found), None if g == 1 else GENUS_CAVEAT)


def torsion_orders(g: int, i: int, max_order: int = DEFAULT_MAX_ORDER) -> set[int]:
    """Orders n such that Z/n embeds in the pure mapping class group of genus g with i punctures."""
    return set(torsion_result(g, i, max_order).orders)


@dataclass(frozen=True)
class DatumVerdict:
    datum: BranchDatum
    realizable: bool
    fixed_points: int
    gate: str  # "admitted" | "not_realizable" | "insufficient_fixed_points"

    def to_dict(self) -> dict:
        out = self.datum.to_dict()
        out.update(realizable=self.realizable, gate=self.gate)
        return out


@dataclass(frozen=True)
class ExclusionReport:
    g: int
    n: int
    i: int
    required: int
    verdicts: tuple[DatumVerdict, ...]

    @property
    def excluded(self) -> bool:
        return not any(v.gate == "admitted" for v in self.verdicts)

    @property
    def reason(self) -> str:
        if not self.verdicts:
            return "no_solutions"
        if not self.excluded:
            return "admitted"
        if not any(v.realizable for v in self.verdicts):
            return "no_realizable_solution"
        return "insufficient_fixed_points"

    def to_dict(self) -> dict:
        return {
            "g": self.g, "n": self.n, "i": self.i, "required_fixed_points": self.required,
            "excluded": self.excluded, "reason": self.reason,
            "data": [v.to_dict() for v in self.verdicts],
        }

    def describe(self) -> str:
        lines = [f"Z/{self.n} on genus {self.g} with {self.i} puncture(s): "
                 f"needs >= {self.required} fixed point(s) -> {self.reason}"]
        for v in self.verdicts:
            d = v.datum
            lines.append(f"  h={d.h} counts={d.values} fixed={v.fixed_points} "
                         f"realizable={'yes' if v.realizable else 'no'} [{v.gate}]")
        return "\n".join(lines)


def exclusion_report(g: int, n: int, i: int, max_order: int = DEFAULT_MAX_ORDER) -> ExclusionReport:
    """Explain, datum by datum, whether Z/n can sit in the pure group Gamma_g^i."""
    need = required_fixed_points(g, i)
    verdicts = []
    for d in enumerate_branch_data(g, n):
        real = is_realizable(d, max_order)
        if not real:
            gate = "not_realizable"
        elif d.fixed_points < need or (g == 1 and d.is_free):
            # free torus actions are translations, isotopic to the identity
            gate = "insufficient_fixed_points"
        else:
            gate = "admitted"
        verdicts.append(DatumVerdict(d, real, d.fixed_points, gate))
    return ExclusionReport(g, n, i, need, tuple(verdicts))


# --- virtually cyclic shapes -------------------------------------------------

_KINDS = ("Trivial", "FiniteCyclic", "InfiniteCyclic", "DirectProductFZ",
          "SemidirectFZ", "AmalgamD", "DInfinity")


@dataclass(frozen=True, order=True)
class VCShape:
    """One isomorphism type of virtually cyclic group.

    DirectProductFZ(n) is Z/n x Z; for composite n it is the trivial-action
    member of the semidirect family. AmalgamD(n) is Z/2n *_{Z/n} Z/2n.
    """

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.kind in ("Trivial", "InfiniteCyclic", "DInfinity"):
            if self.n:
                raise ValueError(f"{self.kind} takes no parameter")
        elif self.n < 1:
            raise ValueError(f"{self.kind} needs a positive parameter")
        if self.kind == "AmalgamD" and self.n % 2 == 0:
            raise ValueError("AmalgamD(n) requires n odd")

    @property
    def finite(self) -> bool:
        return self.kind in ("Trivial", "FiniteCyclic")

    @property
    def finite_part(self) -> int:
        """Order of the maximal finite normal subgroup."""
        if self.kind in ("Trivial", "InfiniteCyclic", "DInfinity"):
            return 1
        return self.n

    def contains(self, other: "VCShape") -> bool:
        """Whether this shape visibly contains a copy of ``other`` (used for pruning)."""
        if self == other:
            return True
        if other.kind == "DInfinity":
            return self.kind == "AmalgamD"
        if other.kind == "DirectProductFZ" and isprime(other.n):
            return (self.kind in ("DirectProductFZ", "SemidirectFZ", "AmalgamD")
                    and self.n % other.n == 0)
        return False

    @property
    def label(self) -> str:
        return {
            "Trivial": "1",
            "FiniteCyclic": f"Z/{self.n}",
            "InfiniteCyclic": "Z",
            "DirectProductFZ": f"Z/{self.n} × Z",
            "SemidirectFZ": f"Z/{self.n} ⋊ Z",
            "AmalgamD": f"Z/{2 * self.n} ∗_Z/{self.n} Z/{2 * self.n}",
            "DInfinity": "D∞",
        }[self.kind]

    def __str__(self) -> str:
        if self.kind in ("Trivial", "InfiniteCyclic", "DInfinity"):
            return self.kind
        return f"{self.kind}({self.n})"

    @classmethod
    def parse(cls, text: str) -> "VCShape":
        m = re.fullmatch(r"\s*(\w+)\s*(?:\(\s*(\d+)\s*\))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse shape {text!r}")
        return cls(m.group(1), int(m.group(2) or 0))


TRIVIAL = VCShape("Trivial")
INFINITE_CYCLIC = VCShape("InfiniteCyclic")
D_INFINITY = VCShape("DInfinity")


@dataclass(frozen=True)
class NormalizerFact:
    order: int
    description: str
    finite: bool
    cite: str


@dataclass(frozen=True)
class Exclusion:
    shape: VCShape
    cite: str
    profile: str | None = None


@dataclass(frozen=True)
class GroupFacts:
    """Declared subgroup structure of Gamma_g^i, every item with a citation."""

    g: int
    i: int
    central_involution: bool = False
    central_involution_cite: str | None = None
    normalizers: tuple[NormalizerFact, ...] = ()
    exclusions: tuple[Exclusion, ...] = ()

    def __post_init__(self):
        if self.central_involution and not self.central_involution_cite:
            raise ValueError("central_involution needs a citation")
        for f in self.normalizers + self.exclusions:
            if not f.cite:
                raise ValueError(f"fact {f} lacks a citation")

    def with_profiles(self, profiles) -> "GroupFacts":
        """Drop exclusions that belong to profiles not enabled."""
        keep = tuple(e for e in self.exclusions if e.profile is None or e.profile in profiles)
        return GroupFacts(self.g, self.i, self.central_involution, self.central_involution_cite,
                          self.normalizers, keep)

    @classmethod
    def from_dict(cls, d: dict) -> "GroupFacts":
        ci = d.get("central_involution")
        return cls(
            g=int(d["genus"]),
            i=int(d["punctures"]),
            central_involution=bool(ci),
            central_involution_cite=ci.get("cite") if isinstance(ci, dict) else None,
            normalizers=tuple(
                NormalizerFact(int(x["order"]), x["normalizer"], bool(x["finite"]), x.get("cite", ""))
                for x in d.get("normalizers", [])
            ),
            exclusions=tuple(
                Exclusion(VCShape.parse(x["shape"]), x.get("cite", ""), x.get("profile"))
                for x in d.get("exclusions", [])
            ),
        )


def empty_facts(g: int, i: int) -> GroupFacts:
    return GroupFacts(g, i)


@dataclass(frozen=True)
class VCClassification:
    g: int
    i: int
    torsion: frozenset
    candidates: tuple[VCShape, ...]
    kept: tuple[VCShape, ...]
    pruned: tuple[tuple[VCShape, str], ...]  # (shape, citation that removed it)
    caveat: str | None = None
    note: str = ("infinite shapes with composite finite part require the Z-action to be "
                 "trivial on every prime-order subgroup")

    def to_dict(self) -> dict:
        return {
            "torsion_orders": sorted(self.torsion),
            "candidates": [str(s) for s in self.candidates],
            "shapes": [{"shape": str(s), "label": s.label} for s in self.kept],
            "pruned": [{"shape": str(s), "label": s.label, "cite": c} for s, c in self.pruned],
            "caveat": self.caveat,
            "note": self.note,
        }


def candidate_shapes(torsion) -> list[VCShape]:
    """Shapes allowed by the structure of virtually cyclic subgroups, before any facts."""
    ts = sorted(torsion)
    out = [TRIVIAL] + [VCShape("FiniteCyclic", n) for n in ts if n > 1] + [INFINITE_CYCLIC]
    for n in ts:
        if n > 1 and isprime(n):
            out.append(VCShape("DirectProductFZ", n))
    for n in ts:
        if n > 1 and not isprime(n):
            out.append(VCShape("SemidirectFZ", n))
            out.append(VCShape("DirectProductFZ", n))
    if 2 in torsion:
        out.append(D_INFINITY)
    for n in ts:
        if n > 1 and n % 2 and 2 * n in torsion:
            out.append(VCShape("AmalgamD", n))
    return out


def classify_vc_shapes(g: int, i: int, facts: GroupFacts | None = None,
                       max_order: int = DEFAULT_MAX_ORDER) -> VCClassification:
    tr = torsion_result(g, i, max_order)
    facts = facts or empty_facts(g, i)
    cands = candidate_shapes(tr.orders)

    removers: list[tuple[VCShape, str]] = []
    if facts.central_involution:
        removers.append((D_INFINITY, facts.central_involution_cite))
    for nf in facts.normalizers:
        if nf.finite and isprime(nf.order):
            removers.append((VCShape("DirectProductFZ", nf.order), nf.cite))
    for ex in facts.exclusions:
        removers.append((ex.shape, ex.cite))

    kept, pruned = [], []
    for s in cands:
        hit = next((cite for r, cite in removers if s.contains(r)), None)
        if hit is None:
            kept.append(s)
        else:
            pruned.append((s, hit))
    return VCClassification(g, i, tr.orders, tuple(cands), tuple(kept), tuple(pruned), tr.caveat)


def enumerate_vc_shapes(g: int, i: int, facts: GroupFacts | None = None,
                        max_order: int = DEFAULT_MAX_ORDER) -> list[VCShape]:
    """Candidate virtually cyclic subgroup shapes of Gamma_g^i after pruning by ``facts``."""
    return list(classify_vc_shapes(g, i, facts, max_order).kept)


def facts_from_rows(rows, g: int, i: int, profiles=()) -> GroupFacts:
    """Pick the facts for Gamma_g^i out of knowledge-base rows, keeping enabled profiles only.

    Gamma_1^0 uses the rows for Gamma_1^1 since the two groups are isomorphic.
    """
    key = (1, 1) if (g, i) == (1, 0) else (g, i)
    for row in rows:
        if (int(row["genus"]), int(row["punctures"])) == key:
            return GroupFacts.from_dict(row).with_profiles(profiles)
    return empty_facts(g, i)
