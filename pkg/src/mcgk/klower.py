"""Lower algebraic K-groups (Wh, reduced K_0, K_-1, K_-2) of virtually cyclic groups.

Values are three-valued: a finitely generated abelian group descriptor, or
``UNKNOWN`` when nothing forces the answer. ``UNKNOWN`` never compares equal
to zero and never silently becomes zero.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from sympy import divisors, factorint, n_order, primefactors, totient

from .mcg_torsion import VCShape, GroupFacts, classify_vc_shapes

DEGREES = (1, 0, -1, -2)
DEGREE_NAMES = {1: "Wh", 0: "K0~", -1: "K_-1", -2: "K_-2"}
DEFAULT_CYCLIC_BOUND = 48


class TableMismatchError(RuntimeError):
    """A tabulated value disagrees with the closed-form formula."""


@dataclass(frozen=True)
class AbelianGroupDesc:
    """Z^rank plus a torsion multiset of prime powers, or the Unknown marker."""

    rank: int = 0
    torsion: tuple[int, ...] = ()
    unknown: bool = False

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        for t in self.torsion:
            if len(factorint(t)) != 1:
                raise ValueError(f"torsion order {t} is not a prime power")
        object.__setattr__(self, "torsion", tuple(sorted(self.torsion)))

    @property
    def is_zero(self) -> bool:
        return not self.unknown and self.rank == 0 and not self.torsion

    def __add__(self, other: "AbelianGroupDesc") -> "AbelianGroupDesc":
        if self.unknown or other.unknown:
            return UNKNOWN
        return AbelianGroupDesc(self.rank + other.rank, self.torsion + other.torsion)

    def __str__(self) -> str:
        if self.unknown:
            return "?"
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        for t, c in sorted(Counter(self.torsion).items()):
            parts.append(f"(Z/{t})^{c}" if c > 1 else f"Z/{t}")
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        if self.unknown:
            return "unknown"
        return {"rank": self.rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, v) -> "AbelianGroupDesc":
        if v == "unknown":
            return UNKNOWN
        if v == 0 or v == "0":
            return ZERO
        if v == "Z":
            return cls(1)
        return cls(int(v.get("rank", 0)), tuple(int(t) for t in v.get("torsion", ())))


ZERO = AbelianGroupDesc()
UNKNOWN = AbelianGroupDesc(unknown=True)


def free(rank: int) -> AbelianGroupDesc:
    return AbelianGroupDesc(rank)


@dataclass(frozen=True)
class KEntry:
    value: AbelianGroupDesc
    provenance: str  # formula | table | assembled | rule | unknown
    cite: str = ""


@dataclass(frozen=True)
class KProfile:
    entries: tuple[tuple[int, KEntry], ...]

    def __post_init__(self):
        if tuple(d for d, _ in self.entries) != DEGREES:
            raise ValueError("a K-profile needs exactly the degrees 1, 0, -1, -2")

    @classmethod
    def of(cls, mapping: dict) -> "KProfile":
        return cls(tuple((d, mapping[d]) for d in DEGREES))

    def __getitem__(self, degree: int) -> AbelianGroupDesc:
        return dict(self.entries)[degree].value

    def entry(self, degree: int) -> KEntry:
        return dict(self.entries)[degree]

    @property
    def all_zero(self) -> bool:
        return all(e.value.is_zero for _, e in self.entries)

    def summary(self) -> str:
        return ", ".join(f"{DEGREE_NAMES[d]}={e.value}" for d, e in self.entries)

    def to_json(self) -> dict:
        return {
            DEGREE_NAMES[d]: {"value": e.value.to_json(), "text": str(e.value),
                              "provenance": e.provenance, "cite": e.cite}
            for d, e in self.entries
        }


def uniform_profile(value: AbelianGroupDesc, provenance: str, cite: str = "") -> KProfile:
    return KProfile.of({d: KEntry(value, provenance, cite) for d in DEGREES})


# --- component counts of group algebras of Z/n --------------------------------

def _vp(n: int, p: int) -> int:
    return factorint(n).get(p, 0)


def q_components(n: int) -> int:
    """Simple components of Q[Z/n]: one per divisor of n."""
    if n < 1:
        raise ValueError("n must be positive")
    return len(divisors(n))


def qp_components(n: int, p: int) -> int:
    """Simple components of Q_p[Z/n]."""
    total = 0
    for d in divisors(n):
        pp = p ** _vp(d, p)
        m = d // pp
        f = 1 if m == 1 else n_order(p, m)
        total += int(totient(d)) // (int(totient(pp)) * f)
    return total


def fp_components(n: int, p: int) -> int:
    """Simple components of F_p[Z/n]; the p-part only contributes nilpotents."""
    m = n // p ** _vp(n, p)
    return sum(int(totient(d)) // (1 if d == 1 else n_order(p, d)) for d in divisors(m))


def k_minus_one_rank(n: int) -> int:
    return 1 - q_components(n) + sum(qp_components(n, p) - fp_components(n, p)
                                     for p in primefactors(n))


def wh_rank_cyclic(n: int) -> int:
    """Rank of Wh(Z/n): floor(n/2) + 1 - d(n)."""
    if n < 1:
        raise ValueError("n must be positive")
    return n // 2 + 1 - q_components(n)


# --- fact table ----------------------------------------------------------------

@dataclass
class FactTable:
    """Tabulated K-groups keyed by (shape, degree), plus Nil-vanishing declarations."""

    entries: dict = field(default_factory=dict)  # (VCShape, degree) -> (desc, cite)
    nil_vanishing: dict = field(default_factory=dict)  # amalgam key -> cite

    def add(self, shape: VCShape, degree: int, value: AbelianGroupDesc, cite: str) -> None:
        if not cite:
            raise ValueError(f"table entry {shape} degree {degree} lacks a citation")
        if degree not in DEGREES:
            raise ValueError(f"unsupported degree {degree}")
        self.entries[(shape, degree)] = (value, cite)

    def get(self, shape: VCShape, degree: int):
        return self.entries.get((shape, degree))

    def cyclic_orders(self, degree: int) -> list[int]:
        return sorted(s.n for s, d in self.entries if d == degree and s.kind == "FiniteCyclic")

    @classmethod
    def from_dicts(cls, rows, nil_rows=()) -> "FactTable":
        t = cls()
        for r in rows:
            t.add(VCShape.parse(r["shape"]), int(r["degree"]),
                  AbelianGroupDesc.from_json(r["value"]), r.get("cite", ""))
        for r in nil_rows:
            if not r.get("cite"):
                raise ValueError(f"Nil-vanishing entry {r} lacks a citation")
            t.nil_vanishing[amalgam_key(*r["amalgam"])] = r["cite"]
        return t


def amalgam_key(left, middle, right) -> tuple:
    return (str(left), str(middle), str(right))


def k_minus_one_cyclic(n: int, table: FactTable | None = None,
                       bound: int = DEFAULT_CYCLIC_BOUND) -> AbelianGroupDesc:
    """K_-1(Z[Z/n]); free abelian for cyclic groups. Checked against ``table``."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > bound:
        raise ValueError(f"order {n} exceeds the configured bound {bound}")
    value = free(k_minus_one_rank(n))
    if table is not None:
        row = table.get(VCShape("FiniteCyclic", n) if n > 1 else VCShape("Trivial"), -1)
        if row is not None and row[0] != value:
            raise TableMismatchError(f"K_-1(Z/{n}): table {row[0]} vs formula {value}")
    return value


def _cyclic_profile(n: int, table: FactTable) -> KProfile:
    shape = VCShape("FiniteCyclic", n)
    ent = {-2: KEntry(ZERO, "rule", "K_-n vanishes for n >= 2 on finite groups [Carter]")}
    km1 = k_minus_one_cyclic(n, table)
    row = table.get(shape, -1)
    ent[-1] = KEntry(km1, "table" if row else "formula", row[1] if row else "rank formula [Carter]")

    row = table.get(shape, 0)
    ent[0] = KEntry(row[0], "table", row[1]) if row else KEntry(UNKNOWN, "unknown")

    row = table.get(shape, 1)
    if row is not None:
        if row[0].rank != wh_rank_cyclic(n):
            raise TableMismatchError(f"Wh(Z/{n}): table {row[0]} vs rank {wh_rank_cyclic(n)}")
        ent[1] = KEntry(row[0], "table", row[1])
    else:
        ent[1] = KEntry(UNKNOWN, "unknown")
    return KProfile.of(ent)


def k_profile_of_shape(shape: VCShape, table: FactTable) -> KProfile:
    if shape.kind == "Trivial" or (shape.kind == "FiniteCyclic" and shape.n == 1):
        return uniform_profile(ZERO, "rule", "reduced K-theory of Z vanishes in degrees <= 1")
    if shape.kind == "InfiniteCyclic":
        return uniform_profile(ZERO, "rule", "Bass-Heller-Swan; Z[t, 1/t] is regular")
    if shape.kind == "FiniteCyclic":
        return _cyclic_profile(shape.n, table)
    ent = {}
    for d in DEGREES:
        row = table.get(shape, d)
        ent[d] = KEntry(row[0], "table", row[1]) if row else KEntry(UNKNOWN, "unknown")
    return KProfile.of(ent)


def _ses_value(coker_known, coker, ker_known, ker) -> AbelianGroupDesc:
    # 0 -> coker -> K_d(G) -> ker -> 0
    if coker_known and ker_known:
        if coker.is_zero:
            return ker
        if ker.is_zero:
            return coker
        if not ker.torsion and not ker.unknown and not coker.unknown:
            return coker + ker  # free quotient splits
    return UNKNOWN


def assemble_amalgam(left: KProfile, middle: KProfile, right: KProfile,
                     nil_vanishes: bool = True, cite: str = "") -> KProfile:
    """Mayer-Vietoris for G = left *_middle right, degree by degree.

    ... -> K_d(C) -> K_d(A) + K_d(B) -> K_d(G) -> K_{d-1}(C) -> K_{d-1}(A) + K_{d-1}(B) -> ...

    K_{-3} of the finite factors is taken as zero. Without Nil-vanishing every
    degree is Unknown.
    """
    if not nil_vanishes:
        return uniform_profile(UNKNOWN, "unknown", "Nil terms not known to vanish")

    def lvl(p: KProfile, d: int) -> AbelianGroupDesc:
        return ZERO if d < -2 else p[d]

    ent = {}
    for d in DEGREES:
        sum_d = lvl(left, d) + lvl(right, d)
        sum_dm1 = lvl(left, d - 1) + lvl(right, d - 1)
        mid_d, mid_dm1 = lvl(middle, d), lvl(middle, d - 1)
        # cokernel of K_d(C) -> sum_d
        if sum_d.is_zero:
            coker_known, coker = True, ZERO
        elif mid_d.is_zero:
            coker_known, coker = not sum_d.unknown, sum_d
        else:
            coker_known, coker = False, UNKNOWN
        # kernel of K_{d-1}(C) -> sum_{d-1}
        if mid_dm1.is_zero:
            ker_known, ker = True, ZERO
        elif sum_dm1.is_zero:
            ker_known, ker = not mid_dm1.unknown, mid_dm1
        else:
            ker_known, ker = False, UNKNOWN
        ent[d] = KEntry(_ses_value(coker_known, coker, ker_known, ker), "assembled", cite)
    return KProfile.of(ent)


# --- vanishing report ----------------------------------------------------------

SL2Z_AMALGAM = (VCShape("FiniteCyclic", 4), VCShape("FiniteCyclic", 2), VCShape("FiniteCyclic", 6))


@dataclass
class VanishingReport:
    g: int
    i: int
    profile: KProfile
    method: str  # all-zero | amalgam | join
    fic_derived: bool
    shapes: list = field(default_factory=list)  # (VCShape, KProfile)
    offending: list = field(default_factory=list)
    narrative: str = ""
    caveat: str | None = None

    @property
    def conditional(self) -> bool:
        return not self.fic_derived

    def to_json(self) -> dict:
        return {
            "group": f"PureMCG({self.g},0,{self.i})",
            "profile": self.profile.to_json(),
            "method": self.method,
            "fic_derived": self.fic_derived,
            "conditional": self.conditional,
            "shapes": [{"shape": str(s), "label": s.label, "profile": p.to_json()}
                       for s, p in self.shapes],
            "offending": [str(s) for s in self.offending],
            "narrative": self.narrative,
            "caveat": self.caveat,
        }


def vanishing_report(g: int, i: int, facts: GroupFacts | None, table: FactTable,
                     fic_derived: bool = True) -> VanishingReport:
    """Lower K-groups of Gamma_g^i assembled from its virtually cyclic shapes.

    ``fic_derived`` records whether FIC was derived for the group; without it
    the report is conditional.
    """
    cls = classify_vc_shapes(g, i, facts)
    shapes = [(s, k_profile_of_shape(s, table)) for s in cls.kept]
    offending = [s for s, p in shapes if not p.all_zero]
    prefix = "" if fic_derived else "(conditional on FIC) "

    if not offending:
        return VanishingReport(
            g, i, uniform_profile(ZERO, "assembled", "vanishing over all virtually cyclic subgroups"),
            "all-zero", fic_derived, shapes, [],
            prefix + "every virtually cyclic shape has vanishing lower K-theory, so all "
                     "lower K-groups vanish", cls.caveat)

    if g == 1 and i in (0, 1):
        a, c, b = SL2Z_AMALGAM
        key = amalgam_key(a, c, b)
        cite = table.nil_vanishing.get(key, "")
        prof = assemble_amalgam(k_profile_of_shape(a, table), k_profile_of_shape(c, table),
                                k_profile_of_shape(b, table), nil_vanishes=bool(cite), cite=cite)
        return VanishingReport(
            g, i, prof, "amalgam", fic_derived, shapes, offending,
            prefix + f"group is SL_2(Z) = Z/4 *_Z/2 Z/6; Mayer-Vietoris gives {prof.summary()}",
            cls.caveat)

    ent = {}
    for d in DEGREES:
        vals = [p[d] for _, p in shapes]
        ent[d] = KEntry(ZERO if all(v.is_zero for v in vals) else UNKNOWN, "assembled")
    return VanishingReport(
        g, i, KProfile.of(ent), "join", fic_derived, shapes, offending,
        prefix + "non-vanishing or unknown contributions from " + ", ".join(s.label for s in offending),
        cls.caveat)
