import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcone import (Behavior, BellExpression, InvalidInputError,
                   behavior_from_json, behavior_to_json, chsh,
                   conditional_bc_given_ad, correlator_abcd, evaluate_bell,
                   expression_from_json, expression_to_json,
                   hidden_influence_s, is_no_signalling, marginal,
                   supports_only_ABD_ACD, uniform_behavior)
from vcone.behavior import marginal_table


def _random_behavior(rng, n):
    t = rng.dirichlet(np.ones(2 ** n), size=2 ** n).T
    return Behavior(t.reshape((2,) * (2 * n)))


def _random_ns_behavior(rng, n):
    """Mixture of product behaviors: no-signalling by construction."""
    t = np.zeros((2,) * (2 * n))
    for w in rng.dirichlet(np.ones(5)):
        factors = [rng.dirichlet(np.ones(2), size=2).T for _ in range(n)]
        prod = factors[0]
        sub = {2: "ax,by->abxy", 3: "ax,by,cz->abcxyz",
               4: "ax,by,cz,dw->abcdxyzw"}[n]
        t += w * np.einsum(sub, *factors)
    return Behavior(t)


def test_behavior_validation():
    with pytest.raises(InvalidInputError):
        Behavior(np.ones((2, 2, 2, 2)))              # not normalized
    with pytest.raises(InvalidInputError):
        Behavior(np.zeros((2, 2, 2)))                # odd rank
    bad = np.full((2, 2, 2, 2), 0.25)
    bad[0, 0, 0, 0] = -0.1
    bad[1, 1, 0, 0] = 0.6
    with pytest.raises(InvalidInputError):
        Behavior(bad)


def test_uniform_behavior_is_no_signalling():
    for n in (2, 3, 4):
        ok, report = is_no_signalling(uniform_behavior(n))
        assert ok
        assert report.max_variation == 0.0


def test_marginal_of_product():
    rng = np.random.default_rng(0)
    pa = rng.dirichlet(np.ones(2), size=2).T
    pb = rng.dirichlet(np.ones(2), size=2).T
    b = Behavior(np.einsum("ax,by->abxy", pa, pb))
    np.testing.assert_allclose(marginal_table(b, "A"), pa, atol=1e-15)
    np.testing.assert_allclose(
        marginal_table(b, "B", fixed_settings={"A": 1}), pb, atol=1e-15)


def test_marginal_matches_explicit_sum():
    rng = np.random.default_rng(1)
    b = _random_behavior(rng, 4)
    got = marginal(b, "ABD", fixed_settings={"C": 1}).table
    want = b.table[:, :, :, :, :, :, 1, :].sum(axis=2)
    np.testing.assert_allclose(got, want, atol=1e-15)


def test_marginal_table_single_party():
    rng = np.random.default_rng(2)
    b = _random_ns_behavior(rng, 3)
    t = marginal_table(b, "C")
    assert t.shape == (2, 2)
    np.testing.assert_allclose(t.sum(axis=0), 1.0, atol=1e-12)


def test_marginal_setting_independence_for_ns():
    rng = np.random.default_rng(3)
    b = _random_ns_behavior(rng, 4)
    m0 = marginal(b, "ABD", fixed_settings={"C": 0}).table
    m1 = marginal(b, "ABD", fixed_settings={"C": 1}).table
    np.testing.assert_allclose(m0, m1, atol=1e-12)


def test_signalling_detected_with_witness():
    t = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            t[0, 0, x, y] = 0.5 + 0.3 * y
            t[1, 1, x, y] = 0.5 - 0.3 * y
    ok, report = is_no_signalling(Behavior(t))
    assert not ok
    assert report.worst_party == "B"
    # P(a|x) shifts by 0.3 when B flips its setting
    assert report.max_variation == pytest.approx(0.3)
    assert report.variations["A"] <= 1e-15


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([2, 3, 4]))
def test_ns_mixture_closure(seed, n):
    rng = np.random.default_rng(seed)
    b1 = _random_ns_behavior(rng, n)
    b2 = _random_ns_behavior(rng, n)
    lam = rng.uniform()
    mixed = Behavior(lam * b1.table + (1 - lam) * b2.table)
    ok, _ = is_no_signalling(mixed, tol=1e-10)
    assert ok


def test_conditional_bc_given_ad_recombines():
    rng = np.random.default_rng(4)
    b = _random_behavior(rng, 4)
    fam = conditional_bc_given_ad(b)
    assert not fam.absent
    # weights recombine per-cell conditionals into the (y,z)-averaged table
    for (a, x, d, w), cond in fam.conditionals.items():
        block = b.table[a, :, :, d, x, :, :, w]
        norm = block.sum(axis=(0, 1))
        np.testing.assert_allclose(cond.table * norm[None, None],
                                   block, atol=1e-12)


def test_conditional_bc_given_ad_absent_cells():
    t = np.zeros((2,) * 8)
    t[0, :, :, 0, :, :, :, :] = 0.25   # A and D deterministically output 0
    fam = conditional_bc_given_ad(Behavior(t))
    assert len(fam.conditionals) == 4
    assert len(fam.absent) == 12
    assert sum(fam.weights.values()) == pytest.approx(4.0)


def test_evaluate_bell_arity_mismatch():
    with pytest.raises(InvalidInputError):
        evaluate_bell(chsh(), uniform_behavior(3))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1),
       st.floats(-5, 5, allow_nan=False))
def test_evaluate_bell_is_linear(seed, lam):
    rng = np.random.default_rng(seed)
    e = chsh()
    b1 = _random_behavior(rng, 2)
    b2 = _random_behavior(rng, 2)
    mu = abs(lam) / (abs(lam) + 1)   # convex weight from the drawn float
    mixed = Behavior(mu * b1.table + (1 - mu) * b2.table)
    want = mu * evaluate_bell(e, b1) + (1 - mu) * evaluate_bell(e, b2)
    assert evaluate_bell(e, mixed) == pytest.approx(want, abs=1e-10)


def test_supports_only_abd_acd():
    assert supports_only_ABD_ACD(hidden_influence_s())
    # a genuine 4-party correlator needs the BC joint, so it must fail
    assert not supports_only_ABD_ACD(correlator_abcd())


def test_supports_only_abd_acd_ns_slack():
    # adding any no-signalling-vanishing functional must not change the answer
    e = hidden_influence_s()
    bump = np.zeros((2,) * 8)
    for a, b, c, d in np.ndindex(2, 2, 2, 2):
        bump[a, b, c, d, 0, 0, 0, 0] += (-1.0) ** c
        bump[a, b, c, d, 0, 0, 1, 0] -= (-1.0) ** c
    assert supports_only_ABD_ACD(BellExpression(e.coefficients + 0.3 * bump))


def test_behavior_json_roundtrip():
    rng = np.random.default_rng(5)
    b = _random_behavior(rng, 4)
    again = behavior_from_json(behavior_to_json(b))
    np.testing.assert_array_equal(b.table, again.table)


def test_expression_json_roundtrip():
    e = hidden_influence_s()
    again = expression_from_json(expression_to_json(e))
    np.testing.assert_array_equal(e.coefficients, again.coefficients)
    assert again.name == "S"
    assert again.classical_bound == 7.0
