import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdt import fixtures
from qdt.elimination import Stuck, count_polynomial_symbolic
from qdt.errors import BudgetExceeded, VertexMismatch
from qdt.ffcount import (HOLDOUT_LOG, CountFilter, QuotSimpleVanishing, SubSimpleVanishing, count_points,
                         count_polynomial, gaussian_binomial, gl_order, group_order, mobius_weights,
                         trace_counts)
from qdt.linalg import batch_rank, rank
from qdt.qseries import CountPoly


@pytest.fixture(scope="module")
def conifold():
    return fixtures.load("conifold_z2")


@pytest.fixture(scope="module")
def three():
    return fixtures.load("three_cycle")


def _invertible(n, p):
    return sum(1 for xs in itertools.product(range(p), repeat=n * n)
               if rank([list(xs[i * n:(i + 1) * n]) for i in range(n)], p) == n)


@pytest.mark.parametrize("n,p", [(n, p) for n in range(4) for p in (2, 3) if (n, p) != (3, 3)])
def test_gl_order_brute(n, p):
    assert gl_order(n)(p) == _invertible(n, p)


def test_gl_order_formula():
    assert gl_order(2) == CountPoly([0, 1, -1, -1, 1])
    assert group_order((1, 2))(2) == 1 * 6


def test_gaussian_binomial():
    assert gaussian_binomial(4, 2) == CountPoly([1, 1, 2, 1, 1])
    assert gaussian_binomial(3, 4) == CountPoly()
    assert mobius_weights(1) == [CountPoly([1]), CountPoly([-1])]


def test_batch_rank_matches_scalar():
    rng = np.random.default_rng(0)
    m = rng.integers(0, 3, size=(200, 3, 4))
    got = batch_rank(m, 3)
    assert got.tolist() == [rank(x.tolist(), 3) for x in m]


def test_three_cycle_counts(three):
    for p, n in ((2, 3), (3, 5), (5, 9)):
        for method in ("brute", "fiber", "eliminate"):
            assert count_points(three, three.cut, (1, 1, 1), p, method=method) == n
    assert count_polynomial(three, three.cut, (1, 1, 1)) == CountPoly([-1, 2])


def test_conifold_polynomial(conifold):
    poly = count_polynomial(conifold, conifold.cut, (1, 1, 1, 1))
    assert poly == CountPoly([0, 1, -1, -2, 2, 1])
    assert poly(2) == 46
    assert count_polynomial(conifold, conifold.cut, (1, 1, 1, 1), method="eliminate") == poly
    assert count_polynomial(conifold, conifold.cut, (1, 1, 1, 1), method="interpolate") == poly


small_vec = st.tuples(*[st.integers(0, 2)] * 4).filter(lambda v: sum(v) <= 4)


@settings(max_examples=20, deadline=None)
@given(small_vec, st.sampled_from([2, 3]), st.sampled_from([None, "sub", "quot"]))
def test_methods_agree(v, p, kind):
    c = fixtures.load("conifold_z2")
    flt = None
    if kind == "sub":
        flt = SubSimpleVanishing("2")
    elif kind == "quot":
        flt = QuotSimpleVanishing("1")
    counts = []
    for method in ("brute", "fiber", "eliminate"):
        try:
            counts.append(count_points(c, c.cut, v, p, flt, budget=3 * 10 ** 6, method=method))
        except BudgetExceeded:
            pass
    assert len(counts) >= 2
    assert len(set(counts)) == 1


def test_filter_consistency(conifold):
    # filtered counts never exceed the unfiltered count, and a filter at an empty vertex is vacuous
    for v in ((1, 1, 1, 1), (0, 2, 1, 1), (1, 1, 0, 1)):
        full = count_points(conifold, conifold.cut, v, 2)
        sub = count_points(conifold, conifold.cut, v, 2, SubSimpleVanishing("2"))
        assert 0 <= sub <= full
    v = (1, 0, 1, 1)
    assert count_points(conifold, conifold.cut, v, 3, SubSimpleVanishing("2")) == \
        count_points(conifold, conifold.cut, v, 3)


def test_filter_known_values(conifold):
    assert count_points(conifold, conifold.cut, (1, 1, 1, 1), 2, SubSimpleVanishing("2")) == 30


def test_trace_identity_sign(three):
    # #f^-1(1) - #f^-1(0) = -p^d N with d = chi_C(v, v)
    for p in (2, 3):
        z, o = trace_counts(three, (1, 1, 1), p)
        n = count_points(three, three.cut, (1, 1, 1), p)
        assert o - z == -p * n


def test_budget_and_errors(conifold):
    with pytest.raises(BudgetExceeded) as e:
        count_points(conifold, conifold.cut, (2, 2, 2, 2), 5, method="brute", budget=1000)
    assert e.value.budget == 1000
    with pytest.raises(VertexMismatch):
        count_points(conifold, conifold.cut, (1, 1), 2)
    with pytest.raises(ValueError):
        CountFilter("both", "2")


def test_holdouts_recorded(three):
    count_polynomial(three, three.cut, (2, 1, 1))
    assert HOLDOUT_LOG and all(r["ok"] for r in HOLDOUT_LOG if r["ok"] is not None)


def test_symbolic_small_systems():
    # xy = 0 in the plane
    assert count_polynomial_symbolic([{(0, 1): 1}], [0, 1])[0] == {1: 2, 0: -1}
    # xy = 1
    assert count_polynomial_symbolic([{(0, 1): 1, (): -1}], [0, 1])[0] == {1: 1, 0: -1}
    # y = x^2
    assert count_polynomial_symbolic([{(0, 0): 1, (1,): -1}], [0, 1])[0] == {1: 1}
    # x = 0 and x = 1
    assert count_polynomial_symbolic([{(0,): 1}, {(0,): 1, (): -1}], [0])[0] == {}


def test_symbolic_records_bad_primes():
    _, bad = count_polynomial_symbolic([{(0,): 2, (): -1}], [0])
    assert 2 in bad


def test_symbolic_stuck():
    with pytest.raises(Stuck):
        count_polynomial_symbolic([{(0, 0): 1, (1, 1): 1, (): 1}], [0, 1])


def test_trace_symbolic_matches_enumeration(conifold, three):
    for qp, v in ((three, (2, 1, 1)), (conifold, (1, 1, 1, 1))):
        for p in (2, 3):
            assert trace_counts(qp, v, p, method="eliminate") == trace_counts(qp, v, p, method="brute")
