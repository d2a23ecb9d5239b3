import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdt import fixtures
from qdt.errors import InjectivityFailed, NonIsolatedTwoCycle, NotACut, NotStrictSource
from qdt.mutation import (GradedQP, ModulePoint, fz_mutation, in_mutation_domain, mutate_module, mutate_qp,
                          phi, phi_inverse, premutate, reduce)
from qdt.qp import Arrow, Potential, Quiver, is_cut, report, skew_form


@pytest.fixture(scope="module")
def conifold():
    return fixtures.load("conifold_z2")


def _same_up_to_relabel(m1, m2):
    n = len(m1)
    for perm in itertools.permutations(range(n)):
        if all(m1[perm[i]][perm[j]] == m2[i][j] for i in range(n) for j in range(n)):
            return True
    return False


def test_a2_mutation_reverses_arrow():
    a2 = fixtures.load("a2")
    new, cut = mutate_qp(a2, (), "1")
    assert [(a.tail, a.head) for a in new.quiver.arrows] == [("2", "1")]
    assert cut == frozenset()
    assert len(new.potential) == 0


def test_conifold_mutation_shape(conifold):
    new, cut = mutate_qp(conifold, conifold.cut, "2")
    assert len(new.quiver.arrows) == 12
    assert len(cut) == 4
    assert is_cut(new, cut)
    assert report(new.with_cut(cut))["valid"]
    p1 = fixtures.load("p1xp1")
    assert _same_up_to_relabel(new.quiver.arrow_count_matrix(), p1.quiver.arrow_count_matrix())
    # every term of the new potential uses exactly one cut arrow
    for cyc in new.potential.terms:
        assert sum(a in cut for a in cyc) == 1


def test_mutation_matches_fz(conifold):
    new, _ = mutate_qp(conifold, conifold.cut, "2")
    expect = fz_mutation(conifold.quiver.arrow_count_matrix(), conifold.quiver.index("2"))
    assert new.quiver.arrow_count_matrix() == expect


def test_mutation_errors(conifold):
    with pytest.raises(NotStrictSource):
        mutate_qp(conifold, conifold.cut, "1")
    with pytest.raises(NotACut):
        mutate_qp(conifold, {"a1"}, "2")


def test_premutation_adds_composites_and_reverses():
    g = GradedQP.make(fixtures.load("a2").quiver, Potential(), {"b": 0}, 1)
    pre = premutate(g, "2")
    assert {a.id for a in pre.quiver.arrows} == {"b*"}
    assert pre.degrees == {"b*": 1}


def test_reduction_example():
    qp = fixtures.load("reduction_example")
    g = GradedQP.make(qp.quiver, qp.potential, dict(qp.grading), 1)
    red = reduce(g)
    assert red.potential == Potential([(("u", "w", "z"), -1)])
    assert {a.id for a in red.quiver.arrows} == {"u", "w", "z"}


def test_reduction_scales_by_two_cycle_coefficient():
    qp = fixtures.load("reduction_example")
    w = Potential([(("p", "r"), 2), (("p", "u", "w"), 1), (("r", "z"), 1)])
    red = reduce(GradedQP.make(qp.quiver, w, dict(qp.grading), 1))
    assert red.potential == Potential([(("u", "w", "z"), Fraction(-1, 2))])


def test_non_isolated_two_cycle():
    q = Quiver(("1", "2"), (Arrow("p", "1", "2"), Arrow("r", "2", "1")))
    w = Potential([(("p", "r"), 1), (("p", "r", "p", "r"), 1)])
    with pytest.raises(NonIsolatedTwoCycle):
        reduce(GradedQP.make(q, w, {"p": 0, "r": 0}, 0))


def test_phi_values(conifold):
    q = conifold.quiver
    assert phi(q, "2", (1, 1, 1, 1)) == (1, 1, 1, 1)
    assert phi(q, "2", (0, 1, 0, 0)) == (0, -1, 0, 0)
    assert not in_mutation_domain(q, "2", (0, 1, 0, 0))
    assert phi_inverse(q, "2", phi(q, "2", (3, 1, 2, 0))) == (3, 1, 2, 0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=4, max_size=4), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_skew_form_preserved(v, w):
    c = fixtures.load("conifold_z2")
    new, _ = mutate_qp(c, c.cut, "2")
    assert skew_form(c.quiver, v, w) == skew_form(new.quiver, phi(c.quiver, "2", v), phi(c.quiver, "2", w))


def _points(qp, v, p):
    """All representations over F_p on non-cut arrows that satisfy the relations."""
    q = qp.quiver
    shapes = [(a.id, v[q.index(a.head)], v[q.index(a.tail)]) for a in q.arrows if a.id not in qp.cut]
    n = sum(r * c for _, r, c in shapes)
    for xs in itertools.product(range(p), repeat=n):
        it = iter(xs)
        maps = {aid: [[next(it) for _ in range(c)] for _ in range(r)] for aid, r, c in shapes}
        m = ModulePoint(qp, qp.cut, tuple(v), p, maps)
        if m.satisfies_relations():
            yield m


@pytest.mark.parametrize("v", [(1, 1, 1, 1), (1, 2, 1, 1), (1, 1, 2, 1), (0, 1, 1, 1)])
def test_module_transport_satisfies_relations(conifold, v):
    done = failed = 0
    for m in _points(conifold, v, 2):
        try:
            out = mutate_module(m, "2")
        except InjectivityFailed:
            failed += 1
            continue
        assert out.v == phi(conifold.quiver, "2", v)
        out.check_shapes()
        assert out.satisfies_relations()
        done += 1
    assert done > 0
