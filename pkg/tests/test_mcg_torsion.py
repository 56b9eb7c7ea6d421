import pytest
from hypothesis import given, settings, strategies as st
from sympy import divisors

from mcgk import mcg_torsion as mt
from mcgk.mcg_torsion import VCShape


GENUS_ONE = {0: {1, 2, 3, 4, 6}, 1: {1, 2, 3, 4, 6}, 2: {1, 2, 3, 4}, 3: {1, 2, 3},
             4: {1, 2}, 5: {1}, 6: {1}}


@pytest.mark.parametrize("i", sorted(GENUS_ONE))
def test_genus_one_torsion(i):
    r = mt.torsion_result(1, i)
    assert r.orders == GENUS_ONE[i] and r.caveat is None


def test_other_genera_carry_caveat():
    assert mt.torsion_result(2, 0).caveat
    r = mt.torsion_result(0, 4)
    assert r.orders == {1} and r.caveat


def test_genus_two_closed():
    # periodic maps of genus 2: orders 2,3,4,5,6,8,10
    assert mt.torsion_orders(2, 0) == {1, 2, 3, 4, 5, 6, 8, 10}


def test_negative_input():
    with pytest.raises(ValueError):
        mt.torsion_orders(-1, 0)


def test_exclusion_report_order_eight():
    rep = mt.exclusion_report(1, 8, 1)
    h0 = {v.datum.values for v in rep.verdicts if v.datum.h == 0}
    assert h0 == {(4, 0, 0), (1, 2, 0)}
    assert all(v.datum.fixed_points == 0 for v in rep.verdicts)
    assert rep.excluded and rep.reason == "insufficient_fixed_points"
    assert "insufficient_fixed_points" in rep.describe()


def test_exclusion_report_order_nine_and_twelve():
    rep9 = mt.exclusion_report(1, 9, 1)
    assert [v.datum.values for v in rep9.verdicts if v.datum.h == 0] == [(3, 0)]
    assert rep9.excluded
    rep12 = mt.exclusion_report(1, 12, 1)
    assert rep12.excluded and all(v.datum.fixed_points == 0 for v in rep12.verdicts)


def test_exclusion_report_admitted():
    rep = mt.exclusion_report(1, 6, 1)
    assert not rep.excluded and rep.reason == "admitted"
    assert rep.to_dict()["excluded"] is False


def test_free_torus_actions_do_not_count():
    rep = mt.exclusion_report(1, 5, 0)
    free = [v for v in rep.verdicts if v.datum.is_free]
    assert free and all(v.gate == "insufficient_fixed_points" for v in free)


# --- shapes ---------------------------------------------------------------------

def test_shape_invariants():
    with pytest.raises(ValueError):
        VCShape("AmalgamD", 2)
    with pytest.raises(ValueError):
        VCShape("Bogus")
    assert VCShape.parse("SemidirectFZ(4)") == VCShape("SemidirectFZ", 4)
    assert str(VCShape("DirectProductFZ", 2)) == "DirectProductFZ(2)"
    assert VCShape("AmalgamD", 3).contains(mt.D_INFINITY)
    assert VCShape("SemidirectFZ", 4).contains(VCShape("DirectProductFZ", 2))


def facts_for(kb, i, profiles=()):
    return mt.facts_from_rows(kb.group_facts, 1, i, profiles)


LISTS = {
    1: {"1", "Z/2", "Z/4", "Z/3", "Z/6", "Z", "Z/2 × Z", "Z/4 ⋊ Z", "Z/4 × Z"},
    2: {"1", "Z/2", "Z/4", "Z/3", "Z", "Z/2 × Z", "Z/4 ⋊ Z", "Z/4 × Z"},
    3: {"1", "Z/2", "Z/3", "Z", "Z/2 × Z"},
    4: {"1", "Z/2", "Z", "Z/2 × Z"},
    5: {"1", "Z"},
    6: {"1", "Z"},
}


@pytest.mark.parametrize("i", sorted(LISTS))
def test_genus_one_vc_lists(kb, i):
    got = {s.label for s in mt.enumerate_vc_shapes(1, i, facts_for(kb, i))}
    assert got == LISTS[i]


def test_sl2z_profile_prunes_semidirect_four(kb):
    for i in (1, 2):
        got = {s.label for s in mt.enumerate_vc_shapes(1, i, facts_for(kb, i, {"sl2z-remark"}))}
        assert got == LISTS[i] - {"Z/4 ⋊ Z", "Z/4 × Z"}


def test_pruned_shapes_are_cited(kb):
    cls = mt.classify_vc_shapes(1, 1, facts_for(kb, 1, {"sl2z-remark"}))
    assert cls.pruned and all(c for _, c in cls.pruned)
    assert set(cls.kept) | {s for s, _ in cls.pruned} == set(cls.candidates)


def test_facts_require_citations():
    with pytest.raises(ValueError):
        mt.GroupFacts(1, 1, central_involution=True)
    with pytest.raises(ValueError):
        mt.GroupFacts(1, 1, exclusions=(mt.Exclusion(mt.D_INFINITY, ""),))


def test_genus_one_zero_punctures_uses_one_puncture_facts(kb):
    assert facts_for(kb, 0).exclusions == facts_for(kb, 1).exclusions


# --- properties -----------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(g=st.integers(1, 3), i=st.integers(0, 5))
def test_torsion_monotone_in_punctures(g, i):
    assert mt.torsion_orders(g, i + 1) <= mt.torsion_orders(g, i)


@settings(max_examples=25, deadline=None)
@given(g=st.integers(1, 3), i=st.integers(0, 6))
def test_torsion_divisor_closed(g, i):
    orders = mt.torsion_orders(g, i)
    for n in orders:
        assert set(divisors(n)) <= orders


@settings(max_examples=25, deadline=None)
@given(g=st.integers(1, 3), i=st.integers(0, 6))
def test_no_even_amalgams_or_pp_shapes(g, i):
    for s in mt.enumerate_vc_shapes(g, i):
        if s.kind == "AmalgamD":
            assert s.n % 2 == 1
        # every finite part is cyclic of an admissible order, so no Z/p x Z/p
        assert s.finite_part in mt.torsion_orders(g, i) or s.finite_part in (0, 1)
