import pytest

from qsphere.classify import (A1, classify, stated_a2, stated_a4, stated_second_condition,
                              stated_solutions, residuals_vanish, witness_pair)
from qsphere.first_order import calculus_coefficients
from qsphere.scalars import ONE, Q, QINV, poly_gcd_univariate


def test_free_n6_two_solutions():
    res = classify("free", 6)
    assert res.complete and res.solvable
    assert res.solutions == stated_solutions(6)
    assert res.eliminated["a2"] == stated_a2()
    assert res.eliminated["a4"] == stated_a4(6)
    assert res.notes == []


def test_free_small_n_has_no_completeness_claim():
    res = classify("free", 3)
    assert not res.complete
    assert res.solutions == stated_solutions(3)


def test_solution_list_matches_calculus_coefficients():
    for N in (3, 4, 5, 6):
        assert stated_solutions(N) == [calculus_coefficients(N, 1), calculus_coefficients(N, -1)]


def test_printed_a3_of_minus_set_fails():
    printed = stated_solutions(4, literal=True)
    assert printed[0] == stated_solutions(4)[0]
    assert not residuals_vanish(4, printed[1])


@pytest.mark.parametrize("N", [3, 4])
def test_residuals_vanish_for_both_sets(N):
    for sol in stated_solutions(N):
        assert residuals_vanish(N, sol)


def test_theta_zero_has_no_solution():
    res = classify("theta-zero", 6)
    assert not res.solvable
    assert res.witness == witness_pair()
    u = [{m[0]: c for m, c in w.terms.items()} for w in res.witness]
    g = poly_gcd_univariate(u[0], u[1])
    assert max(g) == 0


def test_witness_pair_has_roots_only_at_degenerate_q():
    # a1^2 - 1 and a1^2 - (q + 1/q) a1 + 1 share a root only if q = +-1
    w = witness_pair()
    diff = w[0] - w[1]
    assert diff == A1 * (Q + QINV) - 2 * ONE


def test_second_condition_is_quadratic():
    assert stated_second_condition(6).total_degree() == 2


def test_unknown_constraint():
    with pytest.raises(ValueError):
        classify("sideways", 6)
