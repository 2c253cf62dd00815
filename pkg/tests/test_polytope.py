import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcone import (Behavior, BellExpression, InvalidInputError, chsh,
                   correlator_abcd, deterministic_tables, enumerate_strategies,
                   evaluate_bell, hidden_influence_s, lemma_polytope_max,
                   local_membership, max_bell_local,
                   random_constrained_behavior, uniform_behavior,
                   vcausal_config_max)
from vcone.polytope import F_TABLE, IND, _chain_max, _chain_pair_max


def _pr_box():
    """a xor b = x*y, the textbook no-signalling point outside the local set."""
    t = np.zeros((2, 2, 2, 2))
    for a, b, x, y in itertools.product(range(2), repeat=4):
        if (a + b) % 2 == (x * y) % 2:
            t[a, b, x, y] = 0.5
    return Behavior(t)


def test_deterministic_tables_are_valid_behaviors():
    for n in (2, 3, 4):
        tables = deterministic_tables(n)
        assert tables.shape == (4 ** n,) + (2,) * (2 * n)
        assert set(np.unique(tables)) == {0.0, 1.0}
        for t in tables[:: max(1, 4 ** n // 8)]:
            Behavior(t)   # normalization and positivity


def test_enumerate_strategies_unique():
    strats = enumerate_strategies()
    assert len({(s.f1, s.f2) for s in strats}) == 16
    for s in strats:
        b = s.behavior()
        ok, _ = __import__("vcone").is_no_signalling(b)
        assert ok


def test_chsh_local_bound_by_independent_enumeration():
    # oracle: direct loop over response functions, no shared machinery
    e = chsh()
    best = -np.inf
    for fa in itertools.product(range(2), repeat=2):
        for fb in itertools.product(range(2), repeat=2):
            val = sum((-1.0) ** (fa[x] + fb[y] + x * y)
                      for x in range(2) for y in range(2))
            best = max(best, val)
    assert best == 2.0
    assert max_bell_local(e) == 2.0


def test_local_membership_accepts_vertices_and_mixtures():
    rng = np.random.default_rng(0)
    V = deterministic_tables(2)
    for k in (0, 5, 15):
        assert local_membership(Behavior(V[k])).member
    for _ in range(10):
        w = rng.dirichlet(np.ones(16))
        m = local_membership(Behavior(np.tensordot(w, V, axes=1)))
        assert m.member
        assert m.weights is not None
        assert m.weights.sum() == pytest.approx(1.0, abs=1e-9)


def test_local_membership_rejects_pr_box_with_certificate():
    m = local_membership(_pr_box())
    assert not m.member
    g = m.inequality.ravel()
    V = deterministic_tables(2).reshape(16, 16)
    assert (V @ g).max() == pytest.approx(m.local_bound, abs=1e-12)
    assert m.value > m.local_bound + 0.1    # strict separation
    assert m.value == pytest.approx(g @ _pr_box().table.ravel(), abs=1e-12)


def test_local_membership_rational_pr_box():
    m = local_membership(_pr_box(), rational=True)
    assert not m.member
    assert m.value > m.local_bound


def test_local_membership_boundary_point():
    # CHSH = 2 exactly: on the boundary, still a member
    V = deterministic_tables(2)
    b = Behavior(0.5 * V[0] + 0.5 * V[5])
    assert local_membership(b).member


def test_lemma_polytope_max_s_float(s_expr):
    res = lemma_polytope_max(s_expr)
    assert res.value == pytest.approx(7.0, abs=1e-6)
    assert res.dual_bound == pytest.approx(7.0, abs=1e-6)
    # the argmax behavior really evaluates to the bound
    assert evaluate_bell(s_expr, res.behavior) == pytest.approx(res.value, abs=1e-9)


def test_lemma_polytope_max_s_rational(s_expr):
    res = lemma_polytope_max(s_expr, rational=True)
    assert res.exact_value == Fraction(7)


def test_lemma_polytope_max_normalization_expression():
    # summing all probabilities at one setting tuple is identically 1
    c = np.zeros((2,) * 8)
    c[:, :, :, :, 0, 1, 0, 1] = 1.0
    res = lemma_polytope_max(BellExpression(c), rational=True)
    assert res.exact_value == Fraction(1)


def test_lemma_polytope_max_correlator_against_scipy():
    scipy_opt = pytest.importorskip("scipy.optimize")
    from vcone.polytope import _constrained_lp
    e = correlator_abcd(1, 0, 0, 1)
    lp, _ = _constrained_lp(e)
    ref = scipy_opt.linprog(-lp.c, A_eq=lp.A_eq, b_eq=lp.b_eq,
                            bounds=(0, None), method="highs")
    res = lemma_polytope_max(e)
    assert res.value == pytest.approx(-ref.fun, abs=1e-7)


def test_lemma_polytope_max_s_against_scipy(s_expr):
    scipy_opt = pytest.importorskip("scipy.optimize")
    from vcone.polytope import _constrained_lp
    lp, _ = _constrained_lp(s_expr)
    ref = scipy_opt.linprog(-lp.c, A_eq=lp.A_eq, b_eq=lp.b_eq,
                            bounds=(0, None), method="highs")
    assert -ref.fun == pytest.approx(7.0, abs=1e-7)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.1, 5.0))
def test_lemma_bound_scales_linearly(seed, k):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(2,) * 8)
    v1 = lemma_polytope_max(BellExpression(c)).value
    vk = lemma_polytope_max(BellExpression(k * c)).value
    assert vk == pytest.approx(k * v1, abs=1e-6 * max(1.0, k))


def test_dual_certificate_dominates_random_points(s_expr):
    rng = np.random.default_rng(7)
    res = lemma_polytope_max(s_expr)
    for _ in range(200):
        b, _ = random_constrained_behavior(rng)
        assert evaluate_bell(s_expr, b) <= res.dual_bound + 1e-9


def test_random_constrained_behavior_properties(rng):
    from vcone import conditional_bc_given_ad, is_no_signalling, local_membership
    for _ in range(10):
        b, u = random_constrained_behavior(rng)
        ok, _ = is_no_signalling(b, tol=1e-10)
        assert ok
        assert u.min() >= 0
        np.testing.assert_allclose(u.sum(axis=(0, 2, 4, 5)), 1.0, atol=1e-12)


def test_vcausal_chsh_orderings(chsh_expr):
    # B seeing A's input and output wins every round; isolation gives 2
    assert vcausal_config_max(chsh_expr, "A<B") == 4.0
    assert vcausal_config_max(chsh_expr, "B<A") == 4.0
    assert vcausal_config_max(chsh_expr, "A~B") == 2.0


def test_vcausal_chain_matches_brute_force():
    rng = np.random.default_rng(11)
    E = rng.normal(size=(2,) * 4)   # bipartite expression a,b,x,y
    # oracle: A deterministic f(x); B sees (x, a) and picks the best outcome
    best = -np.inf
    for fa in itertools.product(range(2), repeat=2):
        val = 0.0
        for x in range(2):
            a = fa[x]
            for y in range(2):
                val += max(E[a, 0, x, y], E[a, 1, x, y])
        best = max(best, val)
    got = _chain_max(E, [0, 1])
    assert got == pytest.approx(best, abs=1e-12)


def test_vcausal_chain_pair_matches_brute_force():
    rng = np.random.default_rng(13)
    E = rng.normal(size=(2,) * 6)   # 3 parties: A then (B~C)
    # oracle: for each f_A, per setting x the leaves know (x, a) and pick the
    # best pair of deterministic response functions independently of y,z
    best = -np.inf
    for fa in itertools.product(range(2), repeat=2):
        val = 0.0
        for x in range(2):
            a = fa[x]
            inner = -np.inf
            for kb, kc in itertools.product(range(4), repeat=2):
                tot = sum(E[a, F_TABLE[kb, y], F_TABLE[kc, z], x, y, z]
                          for y in range(2) for z in range(2))
                inner = max(inner, tot)
            val += inner
        best = max(best, val)
    got = _chain_pair_max(E, [0], [1, 2])
    assert got == pytest.approx(best, abs=1e-12)


def test_vcausal_s_orderings(s_expr):
    # without no-signalling the sequential models overshoot the bound
    assert vcausal_config_max(s_expr, "A<D<(B~C)") == pytest.approx(9.0)
    assert vcausal_config_max(s_expr, "A<D<B<C") >= 9.0 - 1e-9
    # imposing no-signalling on the simultaneous pattern recovers the bound
    assert vcausal_config_max(s_expr, "A<D<(B~C)", impose_ns=True) == pytest.approx(
        7.0, abs=1e-6)


def test_vcausal_total_chain_with_ns_is_ns_polytope(chsh_expr):
    # sequential + no-signalling = the full no-signalling set: CHSH hits 4
    assert vcausal_config_max(chsh_expr, "A<B", impose_ns=True) == pytest.approx(4.0)


def test_vcausal_pattern_validation(s_expr, chsh_expr):
    with pytest.raises(InvalidInputError):
        vcausal_config_max(chsh_expr, "A<D")            # wrong parties
    with pytest.raises(InvalidInputError):
        vcausal_config_max(s_expr, "(A~B)<C<D")         # pair not last
    with pytest.raises(InvalidInputError):
        vcausal_config_max(s_expr, "A<B<(C~D)", impose_ns=True)


def test_local_membership_requires_bipartite():
    with pytest.raises(InvalidInputError):
        local_membership(uniform_behavior(3))
    with pytest.raises(InvalidInputError):
        lemma_polytope_max(chsh())
