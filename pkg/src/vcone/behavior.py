"""Multipartite conditional probability tables (behaviors) and Bell expressions.

A Behavior stores the dense table P(outcomes|settings) for n in {2,3,4}
parties with binary outcomes and binary settings. Axis layout: the first n
axes are outcomes (party order A,B,C,D), the last n axes are settings in the
same party order. The flat JSON layout is row-major over that axis order
(outcome tuple major, setting tuple minor).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

PARTIES = "ABCD"

ALGEBRAIC_TOL = 1e-12


def _party_indices(parties, n):
    """Accept 'ABD', ['A','B','D'] or [0,1,3]; return sorted index tuple."""
    idx = []
    for p in parties:
        if isinstance(p, str):
            i = PARTIES.index(p)
        else:
            i = int(p)
        if not 0 <= i < n:
            raise InvalidInputError(f"party {p!r} out of range for {n} parties")
        idx.append(i)
    if len(set(idx)) != len(idx):
        raise InvalidInputError("duplicate parties in subset")
    return tuple(sorted(idx))


@dataclass(frozen=True)
class Behavior:
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim % 2 != 0:
            raise InvalidInputError("table must have one outcome and one setting axis per party")
        n = t.ndim // 2
        if n not in (2, 3, 4) or t.shape != (2,) * (2 * n):
            raise InvalidInputError(f"expected binary table for 2..4 parties, got shape {t.shape}")
        if not np.all(np.isfinite(t)):
            raise InvalidInputError("table entries must be finite")
        if t.min() < -ALGEBRAIC_TOL:
            raise InvalidInputError(f"negative probability {t.min()}")
        sums = t.sum(axis=tuple(range(n)))
        if np.max(np.abs(sums - 1.0)) > 1e-9:
            raise InvalidInputError("table not normalized per setting tuple")
        t = np.clip(t, 0.0, None)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def n_parties(self):
        return self.table.ndim // 2

    @property
    def parties(self):
        return PARTIES[: self.n_parties]


def uniform_behavior(n):
    return Behavior(np.full((2,) * (2 * n), 0.5 ** n))


def marginal_table(b: Behavior, keep, fixed_settings=None) -> np.ndarray:
    """Raw marginal table, any number of kept parties (including one)."""
    n = b.n_parties
    kept = _party_indices(keep, n)
    if not kept:
        raise InvalidInputError("keep must be nonempty")
    dropped = [i for i in range(n) if i not in kept]
    fixed_settings = fixed_settings or {}
    fixed = {}
    for p, s in fixed_settings.items():
        i = _party_indices([p], n)[0]
        fixed[i] = int(s)
    t = b.table
    # fix dropped parties' settings, then sum their outcomes; removing an
    # outcome axis (index < n) shifts later setting-axis positions down by one
    removed = 0
    for i in sorted(dropped, reverse=True):
        t = np.take(t, fixed.get(i, 0), axis=n + i - removed)
        t = t.sum(axis=i)
        removed += 1
    return t


def marginal(b: Behavior, keep, fixed_settings=None) -> Behavior:
    """Sum out the dropped parties' outcomes at the given (default 0) settings."""
    return Behavior(marginal_table(b, keep, fixed_settings))


@dataclass(frozen=True)
class SignallingReport:
    """Max variation of each complementary marginal under one party's setting flip."""

    variations: dict
    witnesses: dict
    max_variation: float
    worst_party: str


def is_no_signalling(b: Behavior, tol: float = ALGEBRAIC_TOL):
    """Check every single-party condition sum_o P = marginal independent of that setting."""
    if tol < 0:
        raise InvalidInputError("tol must be >= 0")
    n = b.n_parties
    variations, witnesses = {}, {}
    for i in range(n):
        m = b.table.sum(axis=i)          # outcomes of others, settings of all
        s_axis = (n - 1) + i             # party i's setting axis in m
        diff = np.abs(np.take(m, 0, axis=s_axis) - np.take(m, 1, axis=s_axis))
        variations[PARTIES[i]] = float(diff.max())
        witnesses[PARTIES[i]] = tuple(int(k) for k in np.unravel_index(diff.argmax(), diff.shape))
    worst = max(variations, key=variations.get)
    report = SignallingReport(variations, witnesses, variations[worst], worst)
    return report.max_variation <= tol, report


@dataclass(frozen=True)
class ConditionalFamily:
    """P(bc|yz, axdw) for every (a,x,d,w) cell with positive weight."""

    conditionals: dict     # (a,x,d,w) -> bipartite Behavior over (b,c|y,z)
    weights: dict          # (a,x,d,w) -> P(ad|xw)
    absent: frozenset      # zero-weight cells


def conditional_bc_given_ad(b: Behavior, tol: float = ALGEBRAIC_TOL) -> ConditionalFamily:
    if b.n_parties != 4:
        raise InvalidInputError("conditional BC|AD requires a 4-party behavior")
    t = b.table  # a,b,c,d,x,y,z,w
    conditionals, weights, absent = {}, {}, set()
    for a, x, d, w in itertools.product(range(2), repeat=4):
        block = t[a, :, :, d, x, :, :, w]          # b,c,y,z
        norm = block.sum(axis=(0, 1))              # per (y,z)
        weight = float(norm.mean())
        if weight <= tol:
            absent.add((a, x, d, w))
            continue
        cond = block / norm[None, None, :, :]
        conditionals[(a, x, d, w)] = Behavior(cond)
        weights[(a, x, d, w)] = weight
    return ConditionalFamily(conditionals, weights, frozenset(absent))


@dataclass(frozen=True)
class BellExpression:
    """Linear functional of a behavior: sum of coefficients * table entries."""

    coefficients: np.ndarray
    name: str = ""
    classical_bound: float | None = None
    quantum_target: float | None = None

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim % 2 != 0 or c.shape != (2,) * c.ndim:
            raise InvalidInputError(f"bad coefficient shape {c.shape}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def n_parties(self):
        return self.coefficients.ndim // 2


def evaluate_bell(e: BellExpression, b: Behavior) -> float:
    if e.n_parties != b.n_parties:
        raise InvalidInputError(
            f"arity mismatch: expression has {e.n_parties} parties, behavior {b.n_parties}"
        )
    return float(np.tensordot(e.coefficients, b.table, axes=e.coefficients.ndim))


def _ns_direction_vectors(n):
    """Functionals that vanish on every no-signalling behavior.

    For party i, others' outcome/setting assignment fixed: (sum over party-i
    outcomes at setting 0) - (same at setting 1).
    """
    vecs = []
    shape = (2,) * (2 * n)
    for i in range(n):
        others = [j for j in range(n) if j != i]
        for o_rest in itertools.product(range(2), repeat=n - 1):
            for s_rest in itertools.product(range(2), repeat=n - 1):
                v = np.zeros(shape)
                for oi in range(2):
                    out = [0] * n
                    for j, oj in zip(others, o_rest):
                        out[j] = oj
                    out[i] = oi
                    for si, sign in ((0, 1.0), (1, -1.0)):
                        st = [0] * n
                        for j, sj in zip(others, s_rest):
                            st[j] = sj
                        st[i] = si
                        v[tuple(out) + tuple(st)] += sign
                vecs.append(v.ravel())
    return np.array(vecs)


def _marginal_lift_basis():
    """Columns: functionals of ABD (z=0) and ACD (y=0) marginal entries, on 4-party tables."""
    cols = []
    for a, bb, d, x, y, w in itertools.product(range(2), repeat=6):
        v = np.zeros((2,) * 8)
        for c in range(2):
            v[a, bb, c, d, x, y, 0, w] = 1.0
        cols.append(v.ravel())
    for a, c, d, x, z, w in itertools.product(range(2), repeat=6):
        v = np.zeros((2,) * 8)
        for bb in range(2):
            v[a, bb, c, d, x, 0, z, w] = 1.0
        cols.append(v.ravel())
    return np.array(cols).T


def supports_only_ABD_ACD(e: BellExpression, tol: float = 1e-9) -> bool:
    """True iff e acts on no-signalling behaviors through the ABD and ACD marginals alone.

    Solves the linear feasibility problem e = lift(f, g) + (combination of
    functionals vanishing on the no-signalling subspace) by least squares.
    """
    if e.n_parties != 4:
        raise InvalidInputError("marginal-support check requires a 4-party expression")
    lift = _marginal_lift_basis()
    ns = _ns_direction_vectors(4).T
    basis = np.hstack([lift, ns])
    target = e.coefficients.ravel()
    sol, *_ = np.linalg.lstsq(basis, target, rcond=None)
    residual = np.linalg.norm(basis @ sol - target)
    return bool(residual <= tol)


# ---------------------------------------------------------------------------
# JSON formats

def behavior_to_json(b: Behavior) -> dict:
    return {
        "n_parties": b.n_parties,
        "outcomes": 2,
        "settings": 2,
        "table": b.table.ravel().tolist(),
    }


def behavior_from_json(d: dict) -> Behavior:
    n = int(d["n_parties"])
    table = np.asarray(d["table"], dtype=float).reshape((2,) * (2 * n))
    return Behavior(table)


def expression_to_json(e: BellExpression) -> dict:
    return {
        "name": e.name,
        "n_parties": e.n_parties,
        "classical_bound": e.classical_bound,
        "quantum_target": e.quantum_target,
        "coefficients": e.coefficients.ravel().tolist(),
    }


def expression_from_json(d: dict) -> BellExpression:
    n = int(d["n_parties"])
    coeffs = np.asarray(d["coefficients"], dtype=float).reshape((2,) * (2 * n))
    return BellExpression(
        coeffs,
        name=d.get("name", ""),
        classical_bound=d.get("classical_bound"),
        quantum_target=d.get("quantum_target"),
    )
