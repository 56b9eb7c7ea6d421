"""Branch data of cyclic actions on closed surfaces.

A Z/n action on a genus-g surface with quotient genus h and ``a_k`` singular
points of order k satisfies the Riemann-Hurwitz identity

    2g - 2 = n(2h - 2) + sum_k a_k (n - n/k)

All arithmetic here is exact integer arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd, lcm

from sympy import divisors

from ._backend import kernels

DEFAULT_MAX_ORDER = 64


class SearchTooLargeError(ValueError):
    """Raised when a generating-vector search exceeds the configured order bound."""


def _nontrivial_divisors(n: int) -> list[int]:
    return [k for k in divisors(n) if k >= 2]


@dataclass(frozen=True)
class BranchDatum:
    """Signature of a Z/n action: ambient genus, quotient genus and singular-point counts.

    ``counts`` holds ``(k, a_k)`` pairs for every divisor k >= 2 of n, in
    ascending order of k (zero counts included).
    """

    g: int
    n: int
    h: int
    counts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.g < 0 or self.n < 1 or self.h < 0:
            raise ValueError(f"invalid branch datum parameters g={self.g} n={self.n} h={self.h}")
        keys = [k for k, _ in self.counts]
        if keys != sorted(keys) or len(set(keys)) != len(keys):
            raise ValueError("counts must be keyed by strictly ascending divisors")
        for k, a in self.counts:
            if k < 2 or self.n % k or a < 0:
                raise ValueError(f"bad count entry ({k}, {a}) for n={self.n}")
        if not self.satisfies_riemann_hurwitz():
            raise ValueError(f"Riemann-Hurwitz identity fails for {self}")

    @classmethod
    def from_counts(cls, g: int, n: int, h: int, values) -> "BranchDatum":
        """Build from a plain tuple of counts aligned with the divisors >= 2 of n."""
        ks = _nontrivial_divisors(n)
        values = tuple(values)
        if len(values) != len(ks):
            raise ValueError(f"expected {len(ks)} counts for n={n}, got {len(values)}")
        return cls(g, n, h, tuple(zip(ks, values)))

    @classmethod
    def from_orders(cls, n: int, h: int, orders) -> "BranchDatum":
        """Build from a multiset of singular orders; the ambient genus is solved for."""
        orders = sorted(orders)
        twice = n * (2 * h - 2) + sum(n - n // k for k in orders if n % k == 0)
        if any(k < 2 or n % k for k in orders):
            raise ValueError(f"singular orders {orders} must be divisors >= 2 of {n}")
        if twice % 2 or twice < -2:
            raise ValueError(f"no surface genus realizes n={n}, h={h}, orders={orders}")
        g = (twice + 2) // 2
        ks = _nontrivial_divisors(n)
        return cls(g, n, h, tuple((k, orders.count(k)) for k in ks))

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.counts)

    @property
    def orders(self) -> tuple[int, ...]:
        """Singular orders as an ascending multiset, one entry per singular point."""
        return tuple(k for k, a in self.counts for _ in range(a))

    @property
    def num_singular(self) -> int:
        return sum(self.values)

    @property
    def fixed_points(self) -> int:
        """Number of singular points of full order n (points fixed by the whole group)."""
        return dict(self.counts).get(self.n, 0)

    @property
    def is_free(self) -> bool:
        return self.num_singular == 0

    def satisfies_riemann_hurwitz(self) -> bool:
        rhs = self.n * (2 * self.h - 2) + sum(a * (self.n - self.n // k) for k, a in self.counts)
        return 2 * self.g - 2 == rhs

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "n": self.n,
            "h": self.h,
            "counts": {str(k): a for k, a in self.counts},
            "fixed_points": self.fixed_points,
            "free": self.is_free,
        }


@dataclass(frozen=True)
class GeneratingVector:
    n: int
    h: int
    elements: tuple[int, ...]

    def validate(self, orders) -> None:
        """Re-check the defining conditions against the prescribed singular orders."""
        orders = tuple(orders)
        if len(orders) != len(self.elements):
            raise ValueError("vector length differs from number of singular points")
        for c, m in zip(self.elements, orders):
            if not 0 <= c < self.n or self.n // gcd(c, self.n) != m:
                raise ValueError(f"{c} does not have order {m} in Z/{self.n}")
        if sum(self.elements) % self.n:
            raise ValueError("entries do not sum to zero")
        if self.h == 0 and reduce(gcd, self.elements, self.n) != 1:
            raise ValueError("entries do not generate Z/n")


def enumerate_branch_data(g: int, n: int) -> list[BranchDatum]:
    """Every branch datum for a Z/n action on a genus-g surface.

    Ordered by quotient genus, then lexicographically by counts. Free actions
    (no singular points) are included; check ``is_free`` to filter them.
    """
    if g < 0 or n < 1:
        raise ValueError("need g >= 0 and n >= 1")
    ks = _nontrivial_divisors(n)
    weights = [n - n // k for k in ks]
    out = []
    h = 0
    while True:
        budget = 2 * g - 2 - n * (2 * h - 2)
        if budget < 0:
            break
        for values in kernels.enumerate_counts(budget, weights):
            out.append(BranchDatum(g, n, h, tuple(zip(ks, values))))
        h += 1
    return out


def find_generating_vectors(datum: BranchDatum, max_order: int = DEFAULT_MAX_ORDER,
                            first_only: bool = False) -> list[GeneratingVector]:
    """Exhaustive brute-force list of generating vectors for ``datum``.

    An empty list means no Z/n action realizes the datum. Surjectivity is
    only required for quotient genus 0; handle generators absorb it otherwise.
    """
    if datum.n > max_order:
        raise SearchTooLargeError(f"search too large: n={datum.n} exceeds bound {max_order}")
    raw = kernels.search_vectors(datum.n, list(datum.orders), datum.h == 0, first_only)
    return [GeneratingVector(datum.n, datum.h, tuple(v)) for v in raw]


def is_realizable(datum: BranchDatum, max_order: int = DEFAULT_MAX_ORDER) -> bool:
    return bool(find_generating_vectors(datum, max_order, first_only=True))


def _v2(x: int) -> int:
    return (x & -x).bit_length() - 1


def harvey_filter(datum: BranchDatum) -> bool:
    """Classical arithmetic test for existence of a Z/n action with this datum.

    The "at least three singular points when h = 0" clause only applies to
    non-spherical surfaces; rotations of the sphere have two fixed points.
    """
    n, h = datum.n, datum.h
    orders = datum.orders
    if any(n % k for k in orders) or not datum.satisfies_riemann_hurwitz():
        return False
    big = lcm(*orders) if orders else 1
    if n % big:
        return False
    if h == 0:
        if big != n:
            return False
        if datum.g >= 1 and len(orders) < 3:
            return False
    for j in range(len(orders)):
        rest = orders[:j] + orders[j + 1:]
        if (lcm(*rest) if rest else 1) != big:
            return False
    if big % 2 == 0:
        top = _v2(big)
        if sum(1 for k in orders if _v2(k) == top) % 2:
            return False
    return True


def max_full_order_fixed_points(g: int, n: int, max_order: int = DEFAULT_MAX_ORDER) -> int:
    """Largest number of fixed points of a realizable Z/n action on genus g (0 if none)."""
    if g < 0 or n < 2:
        raise ValueError("need g >= 0 and n >= 2")
    if n > max_order:
        raise SearchTooLargeError(f"search too large: n={n} exceeds bound {max_order}")
    best = 0
    for datum in enumerate_branch_data(g, n):
        if datum.fixed_points > best and is_realizable(datum, max_order):
            best = datum.fixed_points
    return best
