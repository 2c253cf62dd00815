import itertools

import numpy as np
import pytest

from vcone import (QUANTUM_S, chsh, correlator_abcd, evaluate_bell,
                   hidden_influence_s, uniform_behavior)
from vcone.behavior import marginal
from vcone.expressions import WF, WG, abd_acd_weights


def test_weight_tables_are_binary_and_sized():
    wf, wg = abd_acd_weights()
    assert set(np.unique(wf)) <= {0.0, 1.0}
    assert set(np.unique(wg)) <= {0.0, 1.0}
    assert wf.sum() == sum(len(v) for v in WF.values())
    assert wg.sum() == sum(len(v) for v in WG.values())


def test_lift_agrees_with_marginal_formula():
    # on a no-signalling behavior the lifted 4-party functional must equal
    # the direct sum over ABD and ACD marginal probabilities
    from vcone import behavior_from_quantum, reference_setup
    b = behavior_from_quantum(reference_setup())
    wf, wg = abd_acd_weights()
    direct = 0.0
    for (x, y, w), triples in WF.items():
        m = marginal(b, "ABD", fixed_settings={"C": 0}).table
        for a, bb, d in triples:
            direct += m[a, bb, d, x, y, w]
    for (x, z, w), triples in WG.items():
        m = marginal(b, "ACD", fixed_settings={"B": 0}).table
        for a, c, d in triples:
            direct += m[a, c, d, x, z, w]
    assert evaluate_bell(hidden_influence_s(), b) == pytest.approx(direct, abs=1e-12)


def test_s_metadata():
    e = hidden_influence_s()
    assert e.n_parties == 4
    assert e.classical_bound == 7.0
    assert e.quantum_target == pytest.approx(QUANTUM_S)
    assert QUANTUM_S == pytest.approx(7 + (np.sqrt(2) - 1) / 2)


def test_s_on_uniform_behavior():
    # every weight hits P(abd|xyw)=1/8 (resp. acd): value = total weight / 8
    wf, wg = abd_acd_weights()
    want = (wf.sum() + wg.sum()) / 8.0
    got = evaluate_bell(hidden_influence_s(), uniform_behavior(4))
    assert got == pytest.approx(want, abs=1e-12)


def test_chsh_correlator_form():
    e = chsh()
    # deterministic a=b=0: every correlator is +1, value 1+1+1-1 = 2
    t = np.zeros((2, 2, 2, 2))
    t[0, 0, :, :] = 1.0
    from vcone import Behavior
    assert evaluate_bell(e, Behavior(t)) == pytest.approx(2.0)
    assert evaluate_bell(e, uniform_behavior(2)) == pytest.approx(0.0)


def test_correlator_abcd_single_setting():
    e = correlator_abcd(1, 0, 1, 0)
    nz = np.argwhere(e.coefficients != 0)
    assert np.array_equal(np.unique(nz[:, 4:], axis=0), [[1, 0, 1, 0]])
    assert evaluate_bell(e, uniform_behavior(4)) == pytest.approx(0.0)
