"""Local polytopes and the certified bound on the constrained behavior set.

The central object is the set of 4-party behaviors P(abcd|xyzw) such that

  (a) for every (a,x,d,w) with P(ad|xw) > 0 the conditional P(bc|yz,axdw)
      is local: a mixture of deterministic response pairs for B and C, and
  (b) P is no-signalling in every party's setting.

Condition (a) written out is P(abcd|xyzw) = P(ad|xw) * sum_l q(l|axdw)
D_l(b|y) D_l(c|z), which is bilinear in (P(ad|xw), q). The substitution

  u(a,x,d,w,l) := P(ad|xw) * q(l|axdw)

removes the nonlinearity: P = sum_l u(a,x,d,w,l) D_l(b|y) D_l(c|z) is linear
in u, u >= 0, and normalization of P(.|xw) becomes sum_{a,d,l} u = 1 per
(x,w). Any nonnegative u satisfying that normalization factors back into a
valid (P(ad|xw), q) pair (zero-probability (a,d|x,w) cells are simply u = 0
rows), so the substitution is lossless. Condition (b) for B and C holds
automatically (their responses are mixtures of setting-deterministic
functions); for A and D it is imposed as explicit linear rows on the induced
P. Maximizing a Bell expression over this set is therefore one exact linear
program in 256 variables; `lemma_polytope_max` solves it, with an exact
rational certificate on request.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .behavior import (PARTIES, Behavior, BellExpression, evaluate_bell,
                       _ns_direction_vectors)
from .errors import InvalidInputError, SolverFailureError
from .lp import INFEASIBLE, OPTIMAL, LinearProgram, LPResult, solve_lp
from .patterns import parse_pattern, pattern_labels

# the 4 deterministic single-party response functions; F_TABLE[k, setting]
F_TABLE = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])

# IND[k, outcome, setting] = 1 iff function k maps setting to outcome
IND = np.zeros((4, 2, 2))
for _k in range(4):
    for _s in range(2):
        IND[_k, F_TABLE[_k, _s], _s] = 1.0

_PROD_SUBS = {2: "ax,by->abxy", 3: "ax,by,cz->abcxyz", 4: "ax,by,cz,dw->abcdxyzw"}


@dataclass(frozen=True)
class DeterministicStrategy:
    """A pair of deterministic response functions, settings -> outcomes."""

    f1: tuple
    f2: tuple

    def behavior(self) -> Behavior:
        k1 = F_TABLE.tolist().index(list(self.f1))
        k2 = F_TABLE.tolist().index(list(self.f2))
        return Behavior(np.einsum(_PROD_SUBS[2], IND[k1], IND[k2]))


def enumerate_strategies():
    """All 16 bipartite deterministic strategies, duplicate-free."""
    return [DeterministicStrategy(tuple(F_TABLE[i]), tuple(F_TABLE[j]))
            for i in range(4) for j in range(4)]


def deterministic_tables(n) -> np.ndarray:
    """All 4^n deterministic n-party behavior tables, index order matching
    itertools.product over per-party function indices."""
    if n not in _PROD_SUBS:
        raise InvalidInputError(f"unsupported party count {n}")
    return np.stack([
        np.einsum(_PROD_SUBS[n], *(IND[k] for k in ks))
        for ks in itertools.product(range(4), repeat=n)
    ])


def max_bell_local(e: BellExpression) -> float:
    """Maximum of e over deterministic local strategies (polytope vertices)."""
    tables = deterministic_tables(e.n_parties)
    vals = np.tensordot(tables, e.coefficients, axes=e.coefficients.ndim)
    return float(vals.max())


@dataclass
class LocalMembership:
    member: bool
    weights: np.ndarray | None      # per-strategy mixture weights when inside
    inequality: np.ndarray | None   # separating functional when outside
    local_bound: float | None       # its max over the 16 vertices
    value: float | None             # its value on the tested behavior
    lp: LPResult | None = None


def local_membership(b: Behavior, rational: bool = False) -> LocalMembership:
    """Decide membership in the bipartite local polytope by LP feasibility.

    Outside the polytope the phase-1 infeasibility certificate is returned as
    an explicit separating Bell functional: inequality . vertex <= local_bound
    for all 16 vertices while inequality . b = value > local_bound.
    """
    if b.n_parties != 2:
        raise InvalidInputError("local_membership expects a bipartite behavior")
    V = deterministic_tables(2).reshape(16, 16)      # rows: strategies
    A_eq = np.vstack([V.T, np.ones((1, 16))])
    b_eq = np.concatenate([b.table.ravel(), [1.0]])
    res = solve_lp(LinearProgram(c=np.zeros(16), A_eq=A_eq, b_eq=b_eq),
                   rational=rational)
    if res.status == OPTIMAL:
        return LocalMembership(True, res.x, None, None, None, res)
    if res.status != INFEASIBLE:
        raise SolverFailureError(f"membership LP ended with status {res.status}")
    g = res.farkas[:16]
    local_bound = float((V @ g).max())
    value = float(g @ b.table.ravel())
    return LocalMembership(False, None, g.reshape((2,) * 4), local_bound, value, res)


# ---------------------------------------------------------------------------
# the constrained-set bound


def _u_to_table_matrix() -> np.ndarray:
    """Matrix mapping flat u(a,x,d,w,l) to the flat behavior table."""
    eye = np.eye(2)
    TP = np.einsum("aA,dD,xX,wW,kby,Kcz->abcdxyzwAXDWkK",
                   eye, eye, eye, eye, IND, IND)
    return TP.reshape(256, 256)


def _constrained_lp(e: BellExpression):
    TP = _u_to_table_matrix()
    c = np.einsum("abcdxyzw,kby,Kcz->axdwkK", e.coefficients, IND, IND).ravel()
    rows = []
    for x in range(2):
        for w in range(2):
            v = np.zeros((2, 2, 2, 2, 4, 4))
            v[:, x, :, w] = 1.0
            rows.append(v.ravel())
    ns = _ns_direction_vectors(4)
    ns_ad = np.vstack([ns[:64], ns[192:]])   # parties A and D; B,C automatic
    A_eq = np.vstack([np.array(rows), ns_ad @ TP])
    b_eq = np.zeros(A_eq.shape[0])
    b_eq[:4] = 1.0
    return LinearProgram(c=c, A_eq=A_eq, b_eq=b_eq), TP


@dataclass
class LemmaBound:
    value: float
    exact_value: Fraction | None
    behavior: Behavior          # an argmax behavior
    u: np.ndarray               # optimal substitution variables
    duals: np.ndarray
    dual_bound: float           # duals . rhs; certifies value <= dual_bound
    lp: LPResult


def lemma_polytope_max(e: BellExpression, rational: bool = False) -> LemmaBound:
    """Maximum of e over the constrained set described in the module docstring.

    With rational=True the optimal basis is re-solved in exact arithmetic and
    the returned exact_value carries no rounding error.
    """
    if e.n_parties != 4:
        raise InvalidInputError("constrained-set bound expects a 4-party expression")
    lp, TP = _constrained_lp(e)
    res = solve_lp(lp, rational=rational)
    if res.status != OPTIMAL:
        raise SolverFailureError(f"bound LP ended with status {res.status}")
    u = np.asarray(res.x)
    behavior = Behavior((TP @ u).reshape((2,) * 8))
    dual_bound = float(res.duals[:4].sum())
    return LemmaBound(res.value, res.exact_value, behavior,
                      u.reshape(2, 2, 2, 2, 4, 4), res.duals, dual_bound, res)


def conditional_locality_check(b: Behavior, rational: bool = False):
    """Whether every present BC|AD conditional of a 4-party behavior lies in
    the bipartite local polytope. Returns (bool, details)."""
    from .behavior import conditional_bc_given_ad
    fam = conditional_bc_given_ad(b)
    failures = []
    for key, cond in fam.conditionals.items():
        m = local_membership(cond, rational=rational)
        if not m.member:
            failures.append({"cell_axdw": list(key),
                             "violation": m.value - m.local_bound})
    details = {"cells_checked": len(fam.conditionals),
               "cells_absent": len(fam.absent),
               "failures": failures}
    return not failures, details


def random_constrained_behavior(rng, components: int = 4):
    """Sample a behavior inside the constrained set, by construction.

    Each component is (local AD behavior) x (strategy mixture for BC), which
    satisfies both defining conditions; convex mixtures stay inside. Returns
    (behavior, u).
    """
    TP = _u_to_table_matrix()
    V_ad = deterministic_tables(2).reshape(16, 16)
    u = np.zeros((2, 2, 2, 2, 4, 4))
    for wgt in rng.dirichlet(np.ones(components)):
        pad = (rng.dirichlet(np.ones(16)) @ V_ad).reshape((2,) * 4)  # a,d,x,w
        q = rng.dirichlet(np.ones(16)).reshape(4, 4)
        u += wgt * np.einsum("adxw,kK->axdwkK", pad, q)
    behavior = Behavior((TP @ u.ravel()).reshape((2,) * 8))
    return behavior, u


# ---------------------------------------------------------------------------
# deterministic sequential maxima


def _chain_max(E, order):
    """Max over strategies where party order[k] sees all earlier parties'
    settings and outcomes: backward induction, alternating a max over the
    latest party's outcome with a sum over its setting."""
    n = len(order)
    G = np.transpose(E, axes=[*order, *(n + i for i in order)])
    for k in range(n, 0, -1):
        G = G.max(axis=k - 1).sum(axis=-1)
    return float(G)


_PAIR_SUBS = {0: "uvUV,guU,hvV->gh",
              1: "auvAUV,guU,hvV->ghaA",
              2: "abuvABUV,guU,hvV->ghabAB"}


def _chain_pair_max(E, chain, pair):
    """Chain followed by two mutually unrelated parties. The two leaves see
    the whole chain, so per chain setting tuple their best joint response
    pair is enumerated (4 x 4 functions); the chain is then backward-induced."""
    n = len(chain) + 2
    order = [*chain, *pair]
    Ep = np.transpose(E, axes=[*order, *(n + i for i in order)])
    m = len(chain)
    inner = np.einsum(_PAIR_SUBS[m], Ep, IND, IND).max(axis=(0, 1))
    G = inner
    for k in range(m, 0, -1):
        G = G.max(axis=k - 1).sum(axis=-1)
    return float(G)


def _ns_polytope_max(e: BellExpression) -> float:
    """Max of e over all no-signalling behaviors (LP over the full table)."""
    n = e.n_parties
    shape = (2,) * (2 * n)
    rows = []
    for s in itertools.product(range(2), repeat=n):
        v = np.zeros(shape)
        v[(slice(None),) * n + s] = 1.0
        rows.append(v.ravel())
    A_eq = np.vstack([np.array(rows), _ns_direction_vectors(n)])
    b_eq = np.zeros(A_eq.shape[0])
    b_eq[:2 ** n] = 1.0
    res = solve_lp(LinearProgram(c=e.coefficients.ravel(), A_eq=A_eq, b_eq=b_eq))
    if res.status != OPTIMAL:
        raise SolverFailureError(f"no-signalling LP ended with status {res.status}")
    return float(res.value)


def vcausal_config_max(e: BellExpression, pattern: str,
                       impose_ns: bool = False) -> float:
    """Maximum of e over behaviors realizable by deterministic strategies
    under the given causal ordering pattern.

    Each party's outcome may depend on its own setting plus the settings and
    outcomes of everything in its past cone. Supported patterns: total chains
    over the expression's parties, and a chain followed by one mutually
    unrelated pair (e.g. "A<D<(B~C)", or "A~B" as the degenerate case).

    With impose_ns=True the no-signalling conditions are added: for a total
    chain this is the full no-signalling polytope (sequential strategies
    reproduce every no-signalling behavior), and for a chain ending in the
    unrelated pair (B~C) it coincides with the constrained set of
    `lemma_polytope_max`.
    """
    groups = parse_pattern(pattern)
    labels = pattern_labels(groups)
    n = e.n_parties
    if sorted(labels) != list(PARTIES[:n]):
        raise InvalidInputError(
            f"pattern {pattern!r} does not cover parties {PARTIES[:n]}")
    sizes = [len(g) for g in groups]
    total_chain = all(s == 1 for s in sizes)
    chain_pair = all(s == 1 for s in sizes[:-1]) and sizes[-1] == 2
    if not (total_chain or chain_pair):
        raise InvalidInputError(f"unsupported ordering pattern {pattern!r}")

    if impose_ns:
        if total_chain:
            return _ns_polytope_max(e)
        if n == 4 and set(groups[-1]) == {"B", "C"}:
            return float(lemma_polytope_max(e).value)
        raise InvalidInputError(
            "no-signalling restriction is only supported for total chains "
            "and for patterns ending in (B~C)")

    idx = [PARTIES.index(l) for l in labels]
    if total_chain:
        return _chain_max(e.coefficients, idx)
    return _chain_pair_max(e.coefficients, idx[:-2], idx[-2:])
