import pytest
from hypothesis import given, settings, strategies as st
from sympy import primefactors, primerange

from mcgk import klower as kl
from mcgk.klower import UNKNOWN, ZERO, AbelianGroupDesc, KEntry, KProfile, free
from mcgk.mcg_torsion import VCShape, facts_from_rows
from oracles import fp_components_by_factoring, q_components_by_factoring, qp_components_by_factoring


@pytest.fixture(scope="module")
def table(kb):
    return kl.FactTable.from_dicts(kb.k_table, kb.nil_vanishing)


@pytest.mark.parametrize("n,expected", [(6, 4), (1, 1), (4, 3)])
def test_q_components_examples(n, expected):
    assert kl.q_components(n) == expected


@pytest.mark.parametrize("n,p,qp,fp", [(6, 2, 4, 2), (6, 3, 4, 2), (1, 2, 1, 1), (4, 2, 3, 1)])
def test_local_component_examples(n, p, qp, fp):
    assert kl.qp_components(n, p) == qp
    assert kl.fp_components(n, p) == fp


@pytest.mark.parametrize("n", range(1, 31))
def test_component_counts_match_polynomial_factoring(n):
    assert kl.q_components(n) == q_components_by_factoring(n)
    for p in set(primefactors(n)) | {2, 3, 5, 7}:
        assert kl.fp_components(n, p) == fp_components_by_factoring(n, p), (n, p)
        assert kl.qp_components(n, p) == qp_components_by_factoring(n, p), (n, p)


@pytest.mark.parametrize("n,rank", [(1, 0), (2, 0), (3, 0), (4, 0), (5, 0), (6, 1)])
def test_k_minus_one_examples(n, rank):
    assert kl.k_minus_one_cyclic(n) == free(rank)


def test_k_minus_one_prime_powers_vanish():
    for p in primerange(2, 48):
        k = 1
        while p ** k <= 48:
            assert kl.k_minus_one_rank(p ** k) == 0
            k += 1


def test_k_minus_one_bound_and_mismatch(table):
    with pytest.raises(ValueError):
        kl.k_minus_one_cyclic(49)
    assert kl.k_minus_one_cyclic(49, bound=60) == free(kl.k_minus_one_rank(49))
    bad = kl.FactTable()
    bad.add(VCShape("FiniteCyclic", 6), -1, ZERO, "deliberately wrong")
    with pytest.raises(kl.TableMismatchError):
        kl.k_minus_one_cyclic(6, bad)


@pytest.mark.parametrize("n,rank", [(6, 0), (2, 0), (5, 1), (7, 2), (1, 0)])
def test_wh_rank_examples(n, rank):
    assert kl.wh_rank_cyclic(n) == rank


def test_formula_table_consistency_all_cyclic_entries(table):
    for n in table.cyclic_orders(-1):
        assert table.get(VCShape("FiniteCyclic", n), -1)[0] == kl.k_minus_one_cyclic(n)
    for n in table.cyclic_orders(1):
        assert table.get(VCShape("FiniteCyclic", n), 1)[0].rank == kl.wh_rank_cyclic(n)
        kl.k_profile_of_shape(VCShape("FiniteCyclic", n), table)  # raises on mismatch


def test_ranks_non_negative_and_component_sanity():
    for n in range(1, 49):
        assert kl.k_minus_one_rank(n) >= 0
        assert kl.wh_rank_cyclic(n) >= 0
        for p in primerange(2, 50):
            # completing at p can only split components further
            assert kl.fp_components(n, p) <= kl.qp_components(n, p)
            assert kl.q_components(n) <= kl.qp_components(n, p)


def test_local_splitting_exceeds_rational_count():
    # Phi_7 splits into two cubics over Q_2 (2 has order 3 mod 7)
    assert kl.qp_components(14, 2) == qp_components_by_factoring(14, 2) > kl.q_components(14)


def test_shape_profiles(table):
    p6 = kl.k_profile_of_shape(VCShape("FiniteCyclic", 6), table)
    assert (p6[1], p6[0], p6[-1], p6[-2]) == (ZERO, ZERO, free(1), ZERO)
    assert kl.k_profile_of_shape(VCShape("InfiniteCyclic"), table).all_zero
    assert kl.k_profile_of_shape(VCShape("DirectProductFZ", 2), table).all_zero
    assert kl.k_profile_of_shape(VCShape("FiniteCyclic", 5), table)[1] == free(1)
    big = kl.k_profile_of_shape(VCShape("FiniteCyclic", 13), table)
    assert big[0].unknown and big[1].unknown
    assert kl.k_profile_of_shape(VCShape("SemidirectFZ", 6), table)[-1].unknown


def test_table_requires_citations():
    with pytest.raises(ValueError):
        kl.FactTable.from_dicts([{"shape": "FiniteCyclic(2)", "degree": 0, "value": 0}])
    with pytest.raises(ValueError):
        kl.FactTable.from_dicts([], [{"amalgam": ["A", "B", "C"]}])


def test_sl2z_assembly(table):
    a, c, b = (kl.k_profile_of_shape(s, table) for s in kl.SL2Z_AMALGAM)
    prof = kl.assemble_amalgam(a, c, b)
    assert (prof[1], prof[0], prof[-1], prof[-2]) == (ZERO, ZERO, free(1), ZERO)


def test_assembly_degenerate_cases():
    z = kl.uniform_profile(ZERO, "rule")
    assert kl.assemble_amalgam(z, z, z).all_zero
    assert all(v.unknown for _, v in
               ((d, kl.assemble_amalgam(z, z, z, nil_vanishes=False)[d]) for d in kl.DEGREES))
    mid = KProfile.of({1: KEntry(ZERO, "t"), 0: KEntry(UNKNOWN, "t"),
                       -1: KEntry(ZERO, "t"), -2: KEntry(ZERO, "t")})
    left = KProfile.of({1: KEntry(free(1), "t"), 0: KEntry(free(1), "t"),
                        -1: KEntry(ZERO, "t"), -2: KEntry(ZERO, "t")})
    prof = kl.assemble_amalgam(left, mid, z)
    assert prof[1].unknown  # middle Unknown in degree 0 feeds degree 1


@pytest.mark.parametrize("i", range(0, 7))
def test_genus_one_vanishing_reports(kb, table, i):
    rep = kl.vanishing_report(1, i, facts_from_rows(kb.group_facts, 1, i), table)
    if i <= 1:
        assert rep.method == "amalgam"
        assert (rep.profile[1], rep.profile[0], rep.profile[-1], rep.profile[-2]) == \
               (ZERO, ZERO, free(1), ZERO)
    else:
        assert rep.method == "all-zero" and rep.profile.all_zero


def test_genus_zero_all_zero(table):
    for i in range(0, 7):
        assert kl.vanishing_report(0, i, None, table).profile.all_zero


def test_conditional_report(table):
    rep = kl.vanishing_report(1, 3, None, table, fic_derived=False)
    assert rep.conditional and rep.narrative.startswith("(conditional")


def test_abelian_desc():
    assert str(AbelianGroupDesc(2, (4, 2, 2))) == "Z^2 + (Z/2)^2 + Z/4"
    assert UNKNOWN != ZERO and not UNKNOWN.is_zero
    with pytest.raises(ValueError):
        AbelianGroupDesc(0, (6,))
    for v in (ZERO, free(3), AbelianGroupDesc(1, (3,)), UNKNOWN):
        assert AbelianGroupDesc.from_json(v.to_json()) == v


# --- Unknown handling ----------------------------------------------------------

values = st.sampled_from([ZERO, free(1), free(2), UNKNOWN])
profiles = st.tuples(values, values, values, values).map(
    lambda vs: KProfile.of({d: KEntry(v, "t") for d, v in zip(kl.DEGREES, vs)}))


@settings(max_examples=300, deadline=None)
@given(a=values, b=values)
def test_unknown_absorbs_sums(a, b):
    s = a + b
    assert s.unknown == (a.unknown or b.unknown)


def _substitute(p: KProfile, fill: AbelianGroupDesc) -> KProfile:
    return KProfile.of({d: KEntry(fill if e.value.unknown else e.value, "t") for d, e in p.entries})


@settings(max_examples=300, deadline=None)
@given(left=profiles, mid=profiles, right=profiles)
def test_unknown_never_collapses_to_zero(left, mid, right):
    out = kl.assemble_amalgam(left, mid, right)
    for d in kl.DEGREES:
        if out[d].unknown:
            continue
        # a known output must not depend on what the Unknown inputs really are
        for fill in (ZERO, free(1), free(3)):
            filled = kl.assemble_amalgam(_substitute(left, fill), _substitute(mid, fill),
                                         _substitute(right, fill))
            assert filled[d] == out[d]
