"""Built-in Bell expressions.

`hidden_influence_s` is the four-party expression used throughout: a sum of
selected ABD- and ACD-marginal probabilities (0/1 weights below). Over the
set of behaviors with local BC|AD conditionals and full no-signalling it is
bounded by 7 (certified exactly by the rational LP path), while four-qubit
measurements reach 7 + (sqrt(2)-1)/2 ~= 7.2071. Because every term touches
at most one of B, C it is a functional of the ABD and ACD marginals alone.
"""
import itertools

import numpy as np

from .behavior import BellExpression

# win sets: for each (x, y, w) the (a, b, d) triples whose ABD-marginal
# probability enters S with weight 1; likewise (x, z, w) -> (a, c, d) for ACD
WF = {
    (0, 0, 1): [(0, 0, 1), (0, 1, 1), (1, 0, 0), (1, 1, 0)],
    (0, 1, 1): [(0, 0, 0), (0, 0, 1), (1, 1, 0), (1, 1, 1)],
    (1, 0, 1): [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)],
}

WG = {
    (0, 0, 0): [(0, 1, 0), (1, 1, 1)],
    (0, 0, 1): [(0, 0, 0), (1, 0, 0), (1, 0, 1), (1, 1, 1)],
    (0, 1, 0): [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 0)],
    (0, 1, 1): [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 1)],
    (1, 0, 1): list(itertools.product(range(2), repeat=3)),
    (1, 1, 0): [(0, 1, 1), (1, 1, 1)],
    (1, 1, 1): list(itertools.product(range(2), repeat=3)),
}

QUANTUM_S = 7 + (np.sqrt(2) - 1) / 2


def abd_acd_weights():
    """Dense 0/1 weight tables wf[a,b,d,x,y,w] and wg[a,c,d,x,z,w]."""
    wf = np.zeros((2,) * 6)
    for (x, y, w), triples in WF.items():
        for a, b, d in triples:
            wf[a, b, d, x, y, w] = 1.0
    wg = np.zeros((2,) * 6)
    for (x, z, w), triples in WG.items():
        for a, c, d in triples:
            wg[a, c, d, x, z, w] = 1.0
    return wf, wg


def lift_abd_acd(wf, wg) -> np.ndarray:
    """Coefficients on the full 4-party table that reproduce the marginal
    functional sum(wf * P_ABD) + sum(wg * P_ACD) on no-signalling behaviors.
    The absent setting is averaged over so the lift is symmetric in it."""
    e = np.zeros((2,) * 8)
    for a, b, c, d, x, y, z, w in itertools.product(range(2), repeat=8):
        e[a, b, c, d, x, y, z, w] = 0.5 * wf[a, b, d, x, y, w] + 0.5 * wg[a, c, d, x, z, w]
    return e


def hidden_influence_s() -> BellExpression:
    wf, wg = abd_acd_weights()
    return BellExpression(
        lift_abd_acd(wf, wg),
        name="S",
        classical_bound=7.0,
        quantum_target=QUANTUM_S,
    )


def chsh() -> BellExpression:
    """<A0B0> + <A0B1> + <A1B0> - <A1B1> with +-1 outcomes; local bound 2."""
    c = np.zeros((2,) * 4)
    for a, b, x, y in itertools.product(range(2), repeat=4):
        c[a, b, x, y] = (-1.0) ** (a + b + x * y)
    return BellExpression(c, name="CHSH", classical_bound=2.0,
                          quantum_target=float(2 * np.sqrt(2)))


def correlator_abcd(x=0, y=0, z=0, w=0) -> BellExpression:
    """Single full correlator <A_x B_y C_z D_w>."""
    c = np.zeros((2,) * 8)
    for a, b, cc, d in itertools.product(range(2), repeat=4):
        c[a, b, cc, d, x, y, z, w] = (-1.0) ** (a + b + cc + d)
    return BellExpression(c, name=f"<A{x}B{y}C{z}D{w}>")
