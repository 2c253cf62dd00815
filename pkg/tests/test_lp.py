"""Embedded simplex, cross-checked against scipy.optimize.linprog (HiGHS)."""
from fractions import Fraction

import numpy as np
import pytest

from vcone import InvalidInputError, LinearProgram, solve_lp
from vcone.lp import FAILED, INFEASIBLE, OPTIMAL, UNBOUNDED

scipy_opt = pytest.importorskip("scipy.optimize")


def _scipy_solve(lp):
    return scipy_opt.linprog(
        -lp.c, A_eq=lp.A_eq, b_eq=lp.b_eq, A_ub=lp.A_ub, b_ub=lp.b_ub,
        bounds=(0, None), method="highs")


def test_small_optimal():
    # max x+y s.t. x+2y<=4, 3x+y<=6: optimum (8/5, 6/5), value 14/5
    lp = LinearProgram(c=[1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    res = solve_lp(lp)
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(2.8, abs=1e-12)
    np.testing.assert_allclose(res.x, [1.6, 1.2], atol=1e-12)


def test_small_optimal_rational_exact():
    lp = LinearProgram(c=[1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    res = solve_lp(lp, rational=True)
    assert res.exact_value == Fraction(14, 5)
    assert res.exact_x == [Fraction(8, 5), Fraction(6, 5)]


def test_unbounded():
    lp = LinearProgram(c=[1, 0], A_ub=[[0, 1]], b_ub=[1])
    assert solve_lp(lp).status == UNBOUNDED


def test_infeasible_with_farkas():
    # x <= 1 and -x <= -2 cannot both hold
    lp = LinearProgram(c=[0], A_ub=[[1], [-1]], b_ub=[1, -2])
    res = solve_lp(lp)
    assert res.status == INFEASIBLE
    y = res.farkas
    A = np.array([[1.0], [-1.0]])
    b = np.array([1.0, -2.0])
    assert np.all(y @ A <= 1e-9)
    assert y @ b > 1e-9


def test_infeasible_equalities_rational_farkas():
    lp = LinearProgram(c=[0, 0], A_eq=[[1, 1], [1, 1]], b_eq=[1, 2])
    res = solve_lp(lp, rational=True)
    assert res.status == INFEASIBLE
    y = res.farkas
    assert y @ np.array([1.0, 2.0]) > 1e-9
    # equality rows: certificate combination must vanish on the columns
    np.testing.assert_allclose(y @ np.array([[1, 1], [1, 1.0]]), 0, atol=1e-12)


def test_equality_and_inequality_mix():
    lp = LinearProgram(c=[2, 3, 1], A_eq=[[1, 1, 1]], b_eq=[1],
                       A_ub=[[1, 0, 0]], b_ub=[0.25])
    res = solve_lp(lp)
    assert res.status == OPTIMAL
    assert res.value == pytest.approx(3.0, abs=1e-12)   # all mass on x2


def test_duals_certify_objective():
    rng = np.random.default_rng(3)
    A = np.vstack([rng.normal(size=(5, 8)), np.ones(8)])   # last row bounds the box
    b = np.concatenate([np.abs(rng.normal(size=5)) + 0.5, [10.0]])
    c = rng.normal(size=8)
    lp = LinearProgram(c=c, A_ub=A, b_ub=b)
    res = solve_lp(lp)
    assert res.status == OPTIMAL
    # weak duality with feasible duals gives a certified upper bound
    assert res.value <= res.duals @ b + 1e-7


@pytest.mark.parametrize("seed", range(20))
def test_random_against_scipy(seed):
    rng = np.random.default_rng(seed)
    n, m_ub, m_eq = 7, 5, 2
    c = rng.normal(size=n)
    A_ub = rng.normal(size=(m_ub, n))
    b_ub = rng.normal(size=m_ub) + 1.0
    A_eq = rng.normal(size=(m_eq, n))
    x0 = np.abs(rng.normal(size=n))
    b_eq = A_eq @ x0   # guarantees a feasible point exists
    lp = LinearProgram(c=c, A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub)
    ours = solve_lp(lp)
    ref = _scipy_solve(lp)
    if ref.status == 3:
        assert ours.status == UNBOUNDED
    elif ref.status == 2:
        assert ours.status == INFEASIBLE
    else:
        assert ours.status == OPTIMAL
        assert ours.value == pytest.approx(-ref.fun, abs=1e-7)


@pytest.mark.parametrize("seed", range(10))
def test_random_rational_matches_float(seed):
    rng = np.random.default_rng(100 + seed)
    c = rng.integers(-3, 4, size=6).astype(float)
    A_ub = rng.integers(-2, 3, size=(4, 6)).astype(float)
    b_ub = rng.integers(1, 5, size=4).astype(float)
    lp = LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub)
    res = solve_lp(lp, rational=True)
    if res.status != OPTIMAL:
        return
    assert res.exact_value is not None
    assert abs(float(res.exact_value) - res.value) <= 1e-9
    ref = _scipy_solve(lp)
    assert float(res.exact_value) == pytest.approx(-ref.fun, abs=1e-8)


def test_iteration_cap_reports_failure():
    lp = LinearProgram(c=[1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert solve_lp(lp, maxiter=0).status == FAILED


def test_input_validation():
    with pytest.raises(InvalidInputError):
        LinearProgram(c=[1, 2])                      # no constraints
    with pytest.raises(InvalidInputError):
        LinearProgram(c=[1, 2], A_ub=[[1, 2, 3]], b_ub=[1])
    with pytest.raises(InvalidInputError):
        LinearProgram(c=[1], A_ub=[[1]], b_ub=None)
