import random

import pytest

from _numeric import NumericSpan, ev, relation_ideal
from qsphere.algebra import (DegreeExceeded, ReductionTable, SphereAlgebra, check_confluence,
                             classical_dimension, defining_relations, graded_dimension, normal_form,
                             sphere_algebra, sphere_element, star)
from qsphere.scalars import ONE, QINV, Scalar
from qsphere.suites import random_terms


def test_relation_count_n3():
    rels = defining_relations(3)
    assert len(rels) == 9 + 1


def test_relation_rank_n3():
    # frozen: 3 independent quadratic relations, 4 with the sphere relation
    rels = [r.terms for r in defining_relations(3)]
    span = NumericSpan()
    for r in rels[:-1]:
        span.add({w: ev(c) for w, c in r.items()})
    assert span.rank == 3
    span.add({w: ev(c) for w, c in rels[-1].items()})
    assert span.rank == 4


def test_sphere_relation_reduces_to_one():
    for N in (3, 4, 5):
        assert normal_form(sphere_element(N), N).terms == {(): ONE}


def test_degree_one_is_normal():
    alg = sphere_algebra(3)
    assert alg.nf_terms({(1,): ONE}) == {(1,): ONE}


def test_x2x1_n3():
    alg = sphere_algebra(3)
    got = alg.nf_terms({(2, 1): ONE})
    assert got == {(1, 2): QINV}
    # oracle: x2 x1 - got lies in the numeric relation ideal
    ideal = relation_ideal([r.terms for r in defining_relations(3)], 3, 2)
    diff = {(2, 1): 1}
    for w, c in got.items():
        diff[w] = diff.get(w, 0) - ev(c)
    assert not ideal.reduce(diff)


def test_star_examples():
    alg = sphere_algebra(3)
    assert alg.star_terms({(1,): ONE}) == {(3,): Scalar.s_power(-1)}
    for i in (1, 2, 3):
        assert alg.star_terms(alg.star_terms({(i,): ONE})) == {(i,): ONE}
    x = alg.x(1) * alg.x(2)
    assert star(x, 3) == star(alg.x(2), 3) * star(alg.x(1), 3)


def test_graded_dimension_examples():
    assert graded_dimension(1, 3) == 3
    assert graded_dimension(2, 3) == 5
    assert graded_dimension(2, 4) == 9


def test_graded_dimension_against_numeric_elimination():
    # oracle: 3^k words minus rank of the degree-k part of the numeric ideal,
    # taken modulo everything of lower degree
    N, k = 3, 3
    rels = [r.terms for r in defining_relations(N)]
    ideal = relation_ideal(rels, N, k)
    lead_k = [w for w in ideal.rows if len(w) == k]
    assert N ** k - len(lead_k) == graded_dimension(k, N) == 7


@pytest.mark.parametrize("N", [3, 4, 5])
def test_flatness(N):
    assert [graded_dimension(k, N) for k in range(5)] == [classical_dimension(k, N) for k in range(5)]


def test_classical_dimensions_n3():
    assert [classical_dimension(k, 3) for k in range(5)] == [1, 3, 5, 7, 9]


def test_rules_confluent():
    for N in (3, 4, 5):
        assert check_confluence(sphere_algebra(N).rules)


def test_normal_form_idempotent_and_linear():
    alg = sphere_algebra(4)
    rng = random.Random(3)
    for _ in range(40):
        a, b = random_terms(rng, 4, 4), random_terms(rng, 4, 4)
        na = alg.nf_terms(a)
        assert alg.nf_terms(na) == na
        s = dict(a)
        for w, c in b.items():
            s[w] = s.get(w, Scalar(0)) + 2 * c
        s = {w: c for w, c in s.items() if c}
        lhs = alg.nf_terms(s)
        rhs = dict(na)
        for w, c in alg.nf_terms(b).items():
            rhs[w] = rhs.get(w, Scalar(0)) + 2 * c
        assert lhs == {w: c for w, c in rhs.items() if c}


def test_product_of_normal_forms():
    alg = sphere_algebra(3)
    rng = random.Random(5)
    for _ in range(30):
        a, b = random_terms(rng, 3, 2), random_terms(rng, 3, 2)
        cat = {}
        for u, cu in a.items():
            for v, cv in b.items():
                cat[u + v] = cat.get(u + v, Scalar(0)) + cu * cv
        cat = {w: c for w, c in cat.items() if c}
        assert alg.nf_terms(cat) == alg.multiply(alg.nf_terms(a), alg.nf_terms(b))


def test_linear_reduction_table_agrees():
    table = ReductionTable(3, 4)
    alg = sphere_algebra(3)
    assert [table.graded_dimension(k) for k in range(5)] == [1, 3, 5, 7, 9]
    rng = random.Random(11)
    for _ in range(30):
        t = random_terms(rng, 3, 4)
        diff = dict(t)
        for w, c in alg.nf_terms(t).items():
            diff[w] = diff.get(w, Scalar(0)) - c
        assert not table.reduce({w: c for w, c in diff.items() if c})
    # reducing twice is reducing once
    r = table.reduce({(3, 2, 1): ONE})
    assert table.reduce(r) == r


def test_degree_exceeded():
    alg = SphereAlgebra(3, max_degree=3)
    with pytest.raises(DegreeExceeded):
        alg.nf_terms({(1, 2, 3, 1): ONE})
    with pytest.raises(DegreeExceeded):
        ReductionTable(3, 2).reduce({(1, 2, 3): ONE})
