import random
from fractions import Fraction

import pytest

from _numeric import ev, relation_ideal
from qsphere.algebra import add_into, defining_relations
from qsphere.first_order import (CONDITIONS, InvalidParameter, calculus, classical_limit_table,
                                 compatibility_conditions, form_str, gamma_alphas, limit_str,
                                 scale_form, sign_value, calculus_coefficients,
                                 theta_commutator_coefficient, theta_prime_factor)
from qsphere.scalars import ONE, Q, QINV, Scalar, q_pow
from qsphere.suites import random_terms


def test_plus_coefficients():
    a1, a2, a3, a4 = calculus_coefficients(5, "plus")
    assert a2 == Q - ONE
    assert a3 == (q_pow(5) - q_pow(3)) / (ONE - q_pow(4))


def test_sign_parsing():
    assert sign_value("minus") == sign_value("-") == -1
    with pytest.raises(InvalidParameter):
        sign_value("sideways")


def test_unit_action():
    calc = calculus(3, 1)
    assert calc.right_mult(calc.dx(2), {(): ONE}) == calc.dx(2)


DX1_X1_N3 = ("q^(1/2)*x1*x1*x3*dx1 + x1*x1*x2*dx2 + q^(-1/2)*x1*x1*x1*dx3"
             " + (q^(-1) - 1 + q)*x1*dx1")


def test_dx1_x1_expansion_n3():
    calc = calculus(3, 1)
    got = calc.basic_product(1, 1)
    assert form_str(got) == DX1_X1_N3
    # oracle: the unreduced rule minus the result is zero modulo the relations, at s = 2
    a1, a2, a3, a4 = calc.coefficients
    d = calc.data
    raw = {}
    for k, l, v in d.Rinv.column(1, 1):
        add_into(raw, {((k,), l): a1 * v})
    add_into(raw, {((1,), 1): a2})
    for k, l, v in d.K.column(1, 1):
        add_into(raw, {((k,), l): a3 * v})
    for (k, l), c in d.C.entries.items():
        add_into(raw, {((1, 1, k), l): a4 * c})
    add_into(raw, got, -ONE)
    ideal = relation_ideal([r.terms for r in defining_relations(3)], 3, 3)
    for l in (1, 2, 3):
        component = {w: ev(c) for (w, m), c in raw.items() if m == l}
        assert not ideal.reduce(component)


def test_right_module_round_trip():
    for N in (3, 4, 5):
        for e in (1, -1):
            calc = calculus(N, e)
            for k in calc.indices:
                for l in calc.indices:
                    f = {((k,), l): ONE}
                    assert calc.to_left_module(calc.to_right_module(f)) == f


def test_right_module_minus_n4():
    calc = calculus(4, -1)
    r = calc.to_right_module({((1,), 2): ONE})
    frozen = {
        (1, (1, 2, 4)): "(q^(-4) + q^(-2))/(1 - q + q^2)",
        (1, (2,)): "(-q^(-2) - q^3)/(1 - q + q^2)",
        (2, (1,)): "(q^(-1) - 1 + q - q^2)/(1 - q + q^2)",
        (2, (1, 1, 4)): "(-q^(-2) - 1)/(1 - q + q^2)",
        (3, (1, 2, 2)): "(q^(-1) + q)/(1 - q + q^2)",
        (4, (1, 1, 2)): "(q + q^3)/(1 - q + q^2)",
    }
    assert {k: str(v) for k, v in r.items()} == frozen
    # oracle: moving the dx's back to the left reproduces x_1 dx_2
    assert calc.to_left_module(r) == {((1,), 2): ONE}


def test_mirrored_rule_leading_coefficient():
    for e in (1, -1):
        calc = calculus(3, e)
        assert calc.coefficients[0] == e
        for i in calc.indices:
            for j in calc.indices:
                assert calc.to_left_module(calc._right_expansion(i, j)) == {((i,), j): ONE}


def test_differentiate_basics():
    for N in (3, 4, 5):
        for e in (1, -1):
            calc = calculus(N, e)
            assert calc.differentiate({(): ONE}) == {}
            sphere = {(k, l): c for (k, l), c in calc.data.C.entries.items()}
            assert calc.differentiate(sphere) == {}


def test_d_x1x2_independent_of_rewriting_order():
    calc = calculus(3, 1)
    direct = calc.differentiate({(1, 2): ONE})
    # x1 x2 = q x2 x1 in X, so d(x1 x2) = q (dx2 . x1 + x2 dx1)
    other = calc.right_mult_word(calc.dx(2), (1,))
    add_into(other, calc.left_mult({(2,): ONE}, calc.dx(1)))
    assert direct == scale_form(other, Q)
    assert form_str(direct) == ("q^(1/2)*x1*x2*x3*dx1 + (-q^(-3/2) - q^(-1/2))*x1*x1*x3*dx2"
                                " + q^(-3/2)*x1*x1*x2*dx3 + x2*dx1 + (q^(-1) + q)*x1*dx2")


@pytest.mark.parametrize("N", [3, 4])
@pytest.mark.parametrize("e", [1, -1])
def test_bimodule_associativity(N, e):
    calc = calculus(N, e)
    alg = calc.algebra
    rng = random.Random(N * 10 + e)
    for _ in range(15):
        om = {(w, rng.randint(1, N)): c for w, c in alg.nf_terms(random_terms(rng, N, 1, 2)).items()}
        a = alg.nf_terms(random_terms(rng, N, 1, 2))
        b = alg.nf_terms(random_terms(rng, N, 1, 2))
        assert calc.right_mult(calc.right_mult(om, a), b) == calc.right_mult(om, alg.multiply(a, b))


@pytest.mark.parametrize("N", [3, 4, 5])
def test_conditions_vanish(N):
    for e in (1, -1):
        conds = compatibility_conditions(calculus(N, e))
        assert all(not f for name in CONDITIONS for f in conds[name])


def test_literal_quadratic_control_fails():
    conds = compatibility_conditions(calculus(3, 1), literal_quadratic=True, which=("d-quadratic",))
    assert any(conds["d-quadratic"])


def test_theta_commutator_and_inner():
    for N in (3, 4):
        for e in (1, -1):
            calc = calculus(N, e)
            c = theta_commutator_coefficient(N, e)
            tp = theta_prime_factor(N, e)
            for i in calc.indices:
                comm = calc.theta_commutator(i)
                assert comm == scale_form(calc.dx(i), c)
                assert scale_form(comm, tp) == calc.dx(i)


def test_theta_commutator_plus_formula():
    N = 5
    want = QINV * (ONE - Q) * (ONE - q_pow(N - 1)) / (ONE + q_pow(N - 2))
    assert theta_commutator_coefficient(N, 1) == want


def test_theta_commutator_limits():
    assert theta_commutator_coefficient(4, 1).limit_q1() == 0
    assert theta_commutator_coefficient(4, -1).limit_q1() == -2


def test_star_of_dx_and_involution():
    for N in (3, 4):
        calc = calculus(N, 1)
        C = calc.data.C
        for i in calc.indices:
            assert calc.star_form(calc.dx(i)) == {((), j): c for (ii, j), c in C.entries.items() if ii == i}
        rng = random.Random(N)
        for _ in range(10):
            f = {(w, rng.randint(1, N)): c
                 for w, c in calc.algebra.nf_terms(random_terms(rng, N, 2)).items()}
            assert calc.star_form(calc.star_form(f)) == calc.normalize(f)


def test_starred_rule_coefficientwise():
    for e in (1, -1):
        calc = calculus(3, e)
        alg = calc.algebra
        for i in calc.indices:
            for j in calc.indices:
                lhs = calc.left_mult(alg.star_terms({(j,): ONE}), calc.star_form(calc.dx(i)))
                assert lhs == calc.star_form(calc.basic_product(i, j))


def test_gamma_alphas_and_bases():
    N = 4
    al = gamma_alphas(N, 1)
    assert al["+"] == -(ONE + q_pow(N - 2)) / (ONE - q_pow(N - 1))
    assert al["-"] == Q * (ONE + q_pow(N - 2)) / (ONE - q_pow(N - 1))
    calc = calculus(N, 1)
    for v in "+-":
        g = calc.gamma(v)
        assert g.commutation_holds()
        for k in calc.indices:
            f = {((k,), 1): ONE}
            assert g.from_gamma(g.to_gamma(f)) == f
    with pytest.raises(InvalidParameter):
        calc.gamma("+", -ONE)


def test_alphas_are_roots_of_the_quadratic():
    # alpha+ and alpha- are the only alphas giving a linear commutation rule
    calc = calculus(3, 1)
    assert not calc.gamma("+", ONE).commutation_holds()
    assert not calc.gamma("+", Q).commutation_holds()


def test_star_on_gamma_plus_calculus():
    calc = calculus(3, 1)
    gp, gm = calc.gamma("+"), calc.gamma("-")
    C = calc.data.C
    for i in calc.indices:
        got = gm.to_gamma(calc.star_form(gp.from_gamma({((), i): ONE})))
        assert got == {((), j): QINV * c for (ii, j), c in C.entries.items() if ii == i}


def test_star_on_gamma_minus_calculus_has_sign():
    calc = calculus(3, -1)
    gp, gm = calc.gamma("+"), calc.gamma("-")
    C = calc.data.C
    for i in calc.indices:
        got = gm.to_gamma(calc.star_form(gp.from_gamma({((), i): ONE})))
        assert got == {((), j): -QINV * c for (ii, j), c in C.entries.items() if ii == i}


def test_classical_limit_tables():
    plus = classical_limit_table(1, 3)
    assert plus["terms"]["(i=j')theta"] == -1
    assert plus["theta_commutator"] == 0 and plus["noncommutative"]
    minus = classical_limit_table(-1, 7)
    assert minus["terms"]["x_i dx_j"] == -2
    assert minus["theta_commutator"] == -2
    assert limit_str(classical_limit_table(1, 4)) == \
        "dx_i . x_j = x_j dx_i - 2/3 (i=j')theta + 2/3 x_i x_j theta"
    assert limit_str(minus) == "dx_i . x_j = -x_j dx_i - 2 x_i dx_j + 2 x_i x_j theta"


def test_limit_table_general_n():
    for N in range(3, 9):
        t = classical_limit_table(1, N)["terms"]
        assert t == {"x_j dx_i": 1, "x_i dx_j": 0, "(i=j')theta": Fraction(-2, N - 1),
                     "x_i x_j theta": Fraction(2, N - 1)}
