import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from mcgk import _kernels_py, surface_actions as sa
from mcgk._backend import BACKENDS
from oracles import branch_data_by_multisets, realizable_by_brute_force


def datum_key(d):
    return (d.h, d.orders)


@pytest.mark.parametrize("g", range(0, 6))
def test_enumeration_matches_multiset_oracle(g):
    for n in range(2, 25):
        got = [datum_key(d) for d in sa.enumerate_branch_data(g, n)]
        assert len(got) == len(set(got))
        assert set(got) == branch_data_by_multisets(g, n), (g, n)


def test_enumeration_order_is_by_h_then_counts():
    data = sa.enumerate_branch_data(3, 6)
    keys = [(d.h, d.values) for d in data]
    assert keys == sorted(keys)


@pytest.mark.parametrize("n,expected", [
    (4, {(1, 2), (4, 0)}),
    (6, {(1, 1, 1), (0, 3, 0), (4, 0, 0)}),
    (8, {(4, 0, 0), (1, 2, 0)}),
    (9, {(3, 0)}),
])
def test_genus_one_h0_tuples(n, expected):
    h0 = {d.values for d in sa.enumerate_branch_data(1, n) if d.h == 0}
    assert h0 == expected


def test_genus_one_order_twelve_has_no_fixed_point():
    assert all(d.fixed_points == 0 for d in sa.enumerate_branch_data(1, 12))


def test_branch_datum_validation():
    with pytest.raises(ValueError):
        sa.BranchDatum.from_counts(1, 4, 0, (1, 1))  # RH fails
    with pytest.raises(ValueError):
        sa.BranchDatum.from_counts(1, 4, 0, (1,))
    with pytest.raises(ValueError):
        sa.BranchDatum(1, 4, 0, ((3, 1),))
    with pytest.raises(ValueError):
        sa.BranchDatum.from_orders(4, 0, (3,))
    d = sa.BranchDatum.from_orders(6, 0, (2, 3, 6))
    assert (d.g, d.fixed_points, d.num_singular) == (1, 1, 3)
    assert d.to_dict()["counts"] == {"2": 1, "3": 1, "6": 1}


@pytest.mark.parametrize("g", range(0, 4))
def test_realizability_matches_full_brute_force(g):
    for n in range(2, 13):
        for d in sa.enumerate_branch_data(g, n):
            assert sa.is_realizable(d) == realizable_by_brute_force(n, d.h, d.orders), d


def test_generating_vectors_validate_and_are_complete():
    d = sa.BranchDatum.from_orders(12, 0, (2, 2, 12, 12))
    vecs = sa.find_generating_vectors(d)
    for v in vecs:
        v.validate(d.orders)
    brute = 0
    from itertools import product
    from math import gcd
    for vec in product(range(12), repeat=4):
        if all(12 // gcd(c, 12) == m for c, m in zip(vec, d.orders)) and sum(vec) % 12 == 0 \
                and gcd(gcd(gcd(vec[0], vec[1]), gcd(vec[2], vec[3])), 12) == 1:
            brute += 1
    assert len(vecs) == brute > 0


def test_generating_vector_validate_rejects():
    v = sa.GeneratingVector(6, 0, (2, 4))
    with pytest.raises(ValueError):
        v.validate((3, 3))  # does not generate
    with pytest.raises(ValueError):
        sa.GeneratingVector(6, 1, (1, 1)).validate((6, 6))


def test_search_bound():
    d = sa.BranchDatum.from_orders(70, 0, (2, 35, 70))
    with pytest.raises(sa.SearchTooLargeError):
        sa.find_generating_vectors(d, max_order=64)
    assert sa.find_generating_vectors(d, max_order=70)


@pytest.mark.parametrize("n,fixed", [(2, 4), (3, 3), (4, 2), (6, 1), (5, 0), (8, 0), (12, 0)])
def test_max_fixed_points_genus_one(n, fixed):
    assert sa.max_full_order_fixed_points(1, n) == fixed


def test_harvey_spot_checks():
    assert sa.harvey_filter(sa.BranchDatum.from_orders(6, 0, (2, 3, 6)))
    assert not sa.harvey_filter(sa.BranchDatum.from_orders(9, 0, (3, 3, 3)))
    assert not sa.harvey_filter(sa.BranchDatum.from_orders(8, 0, (2, 4, 4)))  # lcm 4 != 8


def test_sphere_rotation_is_realizable():
    d = sa.BranchDatum.from_orders(5, 0, (5, 5))
    assert d.g == 0 and sa.is_realizable(d) and sa.harvey_filter(d)


# --- backends -------------------------------------------------------------------

@pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")
def test_backends_agree_on_random_inputs():
    rng = random.Random(20261015)
    py, cc = BACKENDS["python"], BACKENDS["compiled"]
    for _ in range(400):
        weights = [rng.randint(1, 9) for _ in range(rng.randint(0, 5))]
        budget = rng.randint(-2, 30)
        assert list(py.enumerate_counts(budget, weights)) == list(cc.enumerate_counts(budget, weights))
        n = rng.randint(1, 30)
        from sympy import divisors
        ks = [k for k in divisors(n) if k >= 2] or [1]
        orders = [rng.choice(ks) for _ in range(rng.randint(0, 5))]
        gen, first = rng.random() < 0.5, rng.random() < 0.3
        assert [tuple(v) for v in py.search_vectors(n, orders, gen, first)] == \
               [tuple(v) for v in cc.search_vectors(n, orders, gen, first)]


def test_pure_python_fallback_selected_by_env():
    env = dict(os.environ, MCGK_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import mcgk._backend as b; print(b.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_python_kernel_edge_cases():
    assert _kernels_py.enumerate_counts(0, []) == [()]
    assert _kernels_py.enumerate_counts(3, []) == []
    assert _kernels_py.enumerate_counts(-1, [1]) == []
    assert _kernels_py.search_vectors(1, [], True, False) == [()]
    assert _kernels_py.search_vectors(4, [], True, False) == []


# --- properties -----------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(n=st.integers(2, 30), h=st.integers(0, 3), data=st.data())
def test_from_orders_roundtrip_satisfies_rh(n, h, data):
    from sympy import divisors
    ks = [k for k in divisors(n) if k >= 2]
    orders = data.draw(st.lists(st.sampled_from(ks), max_size=6))
    try:
        d = sa.BranchDatum.from_orders(n, h, orders)
    except ValueError:
        return
    assert d.satisfies_riemann_hurwitz()
    assert tuple(sorted(orders)) == d.orders
    assert datum_key(d) in {datum_key(x) for x in sa.enumerate_branch_data(d.g, n)}


@settings(max_examples=60, deadline=None)
@given(g=st.integers(0, 5), n=st.integers(2, 24))
def test_rh_identity_on_enumerated_data(g, n):
    for d in sa.enumerate_branch_data(g, n):
        assert 2 * d.g - 2 == n * (2 * d.h - 2) + sum(n - n // k for k in d.orders)
