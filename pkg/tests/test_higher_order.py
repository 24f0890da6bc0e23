import random
from itertools import product

import pytest

from qsphere.first_order import InvalidParameter
from qsphere.higher_order import (SecondOrderRelations, T_value, annihilation_check, braid_check,
                                  d_theta_gamma_display, d_theta_power_witness, gamma_plus_in_minus,
                                  graded_wedge_dimension, kernel_matches_wedge_relations,
                                  measure_decreases, perturbed_tensor, relation_II,
                                  relation_II_gamma_display, sigma_basis_independence_check,
                                  sigma_bimodule_check, sigma_inverse_check, sigma_kernel_rank,
                                  stated_A, tensor_space, wedge_algebra, wedge_normal_form)
from qsphere.scalars import ONE, Q, Scalar, format_scalar, q_pow
from qsphere.suites import random_wedge


@pytest.fixture(scope="module")
def rel3():
    return SecondOrderRelations(3)


def test_T_value():
    for N in (3, 4, 5):
        assert T_value(N) == 2 * Q * (ONE + q_pow(N - 2)) / ((ONE - Q) * (ONE - q_pow(N - 1)))
    assert format_scalar(T_value(3)) == "2*q/(1 - 2*q + q^2)"


def test_leibniz_relation_matches_display(rel3):
    assert rel3.leibniz_matches_display()


def test_span_equivalences(rel3):
    eq = rel3.equivalence()
    assert eq.pop("printed R in span L") is False
    assert all(eq.values()), eq


def test_I_from_R_and_contraction(rel3):
    assert rel3.I_from_R()
    r = rel3.II_contraction()
    assert format_scalar(r) == "-1 + q + q^2 - q^3"


def test_bimodule_closure(rel3):
    assert rel3.bimodule_closure()


def test_A_solution_space_is_ratio_family(rel3):
    assert rel3.ratio_identities_hold()


def test_stated_A(rel3):
    A = stated_A(3)
    T = T_value(3)
    assert all(A[m + 4] == T * A[m] for m in range(4))
    assert A[6] == Q * A[7]
    assert rel3.admits(A)
    # A7 = q A8 is not forced: breaking it inside the ratio family is still admissible
    B = list(A)
    B[7] = B[7] + ONE
    B[3] = B[7] / T
    assert rel3.admits(B)
    assert B[6] != Q * B[7]


def test_S_value_frozen(rel3):
    S = rel3.S()
    assert S and format_scalar(S) == "-q^(-2) + 2*q^(-1) - 1 - q + 2*q^2 - q^3"


def test_II_gamma_display():
    sp = tensor_space(3)
    assert relation_II(sp) == relation_II_gamma_display(sp)
    assert sp.d_theta() == d_theta_gamma_display(sp)


@pytest.mark.parametrize("N", [3, 4])
def test_sigma_checks(N):
    assert sigma_bimodule_check(N)
    assert sigma_bimodule_check(N, variant="+")
    assert sigma_inverse_check(N)
    assert braid_check(Q, N)
    assert not braid_check(Q, N, perturbed_tensor(N))


def test_sigma_zero_alpha_rejected():
    sp = tensor_space(3)
    with pytest.raises(InvalidParameter):
        sp.sigma(sp.basis_pair(1, 2), 0)


def test_annihilation_only_at_q():
    assert annihilation_check(Q, 3)
    assert not annihilation_check(ONE, 3)
    assert not annihilation_check(Q * Q, 3)


def test_basis_independence():
    assert sigma_basis_independence_check(3)
    assert sigma_basis_independence_check(3, tensor_name="R")


def test_gamma_plus_in_minus():
    N = 3
    f = gamma_plus_in_minus(N, 1)
    assert f[((), 1)] == ONE


def test_wedge_spot_values():
    assert wedge_normal_form({(1, 1): ONE}, 4) == {}
    assert wedge_normal_form({(2, 2): ONE}, 3) == {(1, 3): Scalar.s_power(1) - Scalar.s_power(-1)}
    assert wedge_normal_form({(2, 1): ONE}, 4) == {(1, 2): -Q}
    assert wedge_normal_form({(4, 3, 2, 1): ONE}, 4) == {(1, 2, 3, 4): q_pow(4)}


def test_wedge_normal_form_terminates_and_is_idempotent():
    for N in (3, 4):
        W = wedge_algebra(N)
        rng = random.Random(N)
        for n in range(60):
            t = random_wedge(rng, N, 1 + n % 3)
            trace = []
            once = W.normal_form(t, trace)
            assert measure_decreases(trace)
            assert W.normal_form(once) == once
            assert all(all(a < b for a, b in zip(w, w[1:])) for _u, w in once)


def test_graded_wedge_dimensions():
    assert [graded_wedge_dimension(s, 3) for s in range(5)] == [1, 3, 3, 1, 0]
    assert [graded_wedge_dimension(s, 4) for s in range(6)] == [1, 4, 6, 4, 1, 0]
    # grade N+1 by linear algebra on all words, not by the increasing-word count
    assert wedge_algebra(3).graded_dimension(4) == 0


def test_kernel_and_relations():
    for N in (3, 4):
        assert sigma_kernel_rank(N) == N * (N + 1) // 2 - 1
        assert kernel_matches_wedge_relations(N)


def test_metric_relation_is_implied():
    W = wedge_algebra(3)
    assert W.rules == type(W)(3, include_metric=False).rules


def test_d_theta_squared_survives():
    assert d_theta_power_witness(3)
    assert d_theta_power_witness(4)


def test_tensor_right_multiplication_is_associative():
    sp = tensor_space(3)
    t = sp.basis_pair(1, 3)
    for a, b in product((1, 2, 3), repeat=2):
        lhs = sp.right_mult_letter(sp.right_mult_letter(t, a), b)
        ab = sp.algebra.word_product((a,), (b,))
        assert lhs == sp.right_mult(t, ab)
