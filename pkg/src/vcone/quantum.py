"""Quantum behaviors and see-saw Bell maximization for up to four qubits.

States are pure vectors on (C^2)^{tensor n}; measurements are binary
projective, stored as the outcome-0 projector per setting (outcome 1 is its
complement). Eigensolves use a self-contained cyclic Jacobi routine so runs
are reproducible without depending on LAPACK dispatch.
"""
import itertools
from dataclasses import dataclass, field

import numpy as np

from ._accel import maybe_njit
from .behavior import Behavior, BellExpression
from .errors import InvalidInputError

ATOL = 1e-12

PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

_OUT = "abcd"
_SET = "xyzw"
_BRA = "ijkl"
_KET = "IJKL"


# ---------------------------------------------------------------------------
# cyclic Jacobi Hermitian eigensolver


def _jacobi_sweeps(A, V, tol, max_sweeps):
    n = A.shape[0]
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) > off:
                    off = abs(A[p, q])
        if off <= tol:
            return 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= tol:
                    continue
                phi = apq / abs(apq)
                theta = 0.5 * np.arctan2(2.0 * abs(apq),
                                         A[p, p].real - A[q, q].real)
                c = np.cos(theta)
                s = np.sin(theta)
                # J differs from identity only in the (p,q) block:
                # J[p,p]=c, J[p,q]=-s, J[q,p]=conj(phi)*s, J[q,q]=conj(phi)*c
                cphi = np.conj(phi)
                colp = c * A[:, p] + cphi * s * A[:, q]
                colq = -s * A[:, p] + cphi * c * A[:, q]
                A[:, p] = colp
                A[:, q] = colq
                rowp = c * A[p, :] + phi * s * A[q, :]
                rowq = -s * A[p, :] + phi * c * A[q, :]
                A[p, :] = rowp
                A[q, :] = rowq
                vp = c * V[:, p] + cphi * s * V[:, q]
                vq = -s * V[:, p] + cphi * c * V[:, q]
                V[:, p] = vp
                V[:, q] = vq
    return 1


_jacobi_sweeps_jit = maybe_njit(_jacobi_sweeps)


def eigh_hermitian(H, tol=1e-13, max_sweeps=100):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {H.shape}")
    if np.abs(H - H.conj().T).max() > 1e-9 * max(1.0, np.abs(H).max()):
        raise InvalidInputError("matrix is not Hermitian")
    A = 0.5 * (H + H.conj().T)
    scale = max(1.0, float(np.abs(A).max()))
    V = np.eye(A.shape[0], dtype=complex)
    _jacobi_sweeps_jit(A, V, tol * scale, max_sweeps)
    w = np.diag(A).real
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


# ---------------------------------------------------------------------------
# setups and behaviors


def planar_projector(theta, outcome=0):
    """Projector onto the +-1 eigenstate of cos(theta) Z + sin(theta) X."""
    sign = 1.0 if outcome == 0 else -1.0
    return 0.5 * (np.eye(2, dtype=complex)
                  + sign * (np.cos(theta) * PAULI_Z + np.sin(theta) * PAULI_X))


def bloch_projector(vec, outcome=0):
    """Projector from a unit Bloch vector (nx, ny, nz)."""
    nx, ny, nz = vec
    pauli_y = np.array([[0.0, -1j], [1j, 0.0]])
    op = nx * PAULI_X + ny * pauli_y + nz * PAULI_Z
    sign = 1.0 if outcome == 0 else -1.0
    return 0.5 * (np.eye(2, dtype=complex) + sign * op)


@dataclass(frozen=True)
class QuantumSetup:
    """A pure n-qubit state plus, per party, two binary projective
    measurements given as the outcome-0 projectors (shape (n, 2, 2, 2))."""

    state: np.ndarray
    projectors: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.state, dtype=complex)
        M = np.asarray(self.projectors, dtype=complex)
        n = M.shape[0]
        if n not in (2, 3, 4) or M.shape != (n, 2, 2, 2):
            raise InvalidInputError(f"bad projector array shape {M.shape}")
        if psi.shape != (2 ** n,):
            raise InvalidInputError(
                f"state has shape {psi.shape}, expected ({2 ** n},)")
        if abs(np.linalg.norm(psi) - 1.0) > ATOL * 10:
            raise InvalidInputError("state is not normalized")
        for i, s in itertools.product(range(n), range(2)):
            P = M[i, s]
            if (np.abs(P - P.conj().T).max() > ATOL
                    or np.abs(P @ P - P).max() > 1e-9):
                raise InvalidInputError(
                    f"measurement of party {i} setting {s} is not a projector")
        psi = psi.copy()
        M = M.copy()
        psi.setflags(write=False)
        M.setflags(write=False)
        object.__setattr__(self, "state", psi)
        object.__setattr__(self, "projectors", M)

    @property
    def n_parties(self):
        return self.projectors.shape[0]

    def projector(self, party, setting, outcome):
        P = self.projectors[party, setting]
        return P if outcome == 0 else np.eye(2, dtype=complex) - P


def _full_projectors(M):
    """(n,2,2,2,2): axis order (party, setting, outcome, row, col)."""
    n = M.shape[0]
    full = np.empty((n, 2, 2, 2, 2), dtype=complex)
    full[:, :, 0] = M
    full[:, :, 1] = np.eye(2, dtype=complex) - M
    return full


def behavior_from_quantum(s: QuantumSetup) -> Behavior:
    """P(outcomes|settings) = <psi| tensor-product of projectors |psi>."""
    n = s.n_parties
    full = _full_projectors(s.projectors)
    psi = s.state.reshape((2,) * n)
    ops = [full[i] for i in range(n)]
    sub = ",".join(_SET[i] + _OUT[i] + _BRA[i] + _KET[i] for i in range(n))
    expr = f"{sub},{_BRA[:n]},{_KET[:n]}->{_OUT[:n]}{_SET[:n]}"
    table = np.einsum(expr, *ops, psi.conj(), psi)
    if np.abs(table.imag).max() > 1e-9:
        raise InvalidInputError("behavior table came out non-real")
    return Behavior(table.real)


def bell_operator(e: BellExpression, projectors: np.ndarray) -> np.ndarray:
    """Sum of coefficient x tensor-product-of-projectors; Hermitian."""
    n = e.n_parties
    if projectors.shape[0] != n:
        raise InvalidInputError("party count mismatch")
    full = _full_projectors(np.asarray(projectors, dtype=complex))
    ops = [full[i] for i in range(n)]
    sub = ",".join(_SET[i] + _OUT[i] + _BRA[i] + _KET[i] for i in range(n))
    expr = f"{_OUT[:n]}{_SET[:n]},{sub}->{_BRA[:n]}{_KET[:n]}"
    H = np.einsum(expr, e.coefficients.astype(complex), *ops)
    return H.reshape(2 ** n, 2 ** n)


# ---------------------------------------------------------------------------
# see-saw


@dataclass
class SeesawResult:
    setup: QuantumSetup
    value: float
    trace: list                 # per-restart lists of iteration values
    restarts_used: int
    converged: bool = True


def _party_effective(e, full, psi_t, party):
    """R[setting, outcome, bra, ket] with value = sum M[s,o] * R[s,o]."""
    n = e.n_parties
    others = [i for i in range(n) if i != party]
    subs = [f"{_OUT[:n]}{_SET[:n]}"]
    ops = []
    for q in others:
        subs.append(_SET[q] + _OUT[q] + _BRA[q] + _KET[q])
        ops.append(full[q])
    subs.append(_BRA[:n])
    subs.append(_KET[:n])
    out = _SET[party] + _OUT[party] + _BRA[party] + _KET[party]
    expr = f"{','.join(subs)}->{out}"
    return np.einsum(expr, e.coefficients.astype(complex), *ops,
                     psi_t.conj(), psi_t)


def _seesaw_once(e, M0, max_iter, tol):
    n = e.n_parties
    M = np.asarray(M0, dtype=complex).copy()
    trace = []
    converged = False
    for _ in range(max_iter):
        H = bell_operator(e, M)
        w, V = eigh_hermitian(H)
        psi = V[:, -1]
        trace.append(float(w[-1]))
        if len(trace) >= 2 and abs(trace[-1] - trace[-2]) < tol:
            converged = True
            break
        psi_t = psi.reshape((2,) * n)
        for party in range(n):
            full = _full_projectors(M)
            R = _party_effective(e, full, psi_t, party)
            for s in range(2):
                # value contribution: sum_{o} sum_{iI} M[s,o,i,I] R[s,o,i,I]
                # = tr(M0^T (R0 - R1)) + const, so diagonalize (R0-R1)^T
                delta = (R[s, 0] - R[s, 1]).T
                delta = 0.5 * (delta + delta.conj().T)
                dw, dV = eigh_hermitian(delta)
                keep = dV[:, dw >= 0.0]      # zero eigenspace -> outcome 0
                M[party, s] = keep @ keep.conj().T
    return psi, M, trace[-1], trace, converged


def random_setup(rng, n=4) -> QuantumSetup:
    """Normalized complex Gaussian state, random Bloch-vector measurements."""
    psi = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    psi /= np.linalg.norm(psi)
    M = np.empty((n, 2, 2, 2), dtype=complex)
    for i, s in itertools.product(range(n), range(2)):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        M[i, s] = bloch_projector(v)
    return QuantumSetup(psi, M)


def seesaw_maximize(e: BellExpression, restarts: int = 50,
                    tol: float = 1e-10, seed=None,
                    max_iter: int = 500) -> SeesawResult:
    """Alternate the state step (top eigenvector of the Bell operator) with
    per-party closed-form measurement updates; best value over restarts."""
    if restarts < 1:
        raise InvalidInputError(f"restarts must be >= 1, got {restarts}")
    rng = np.random.default_rng(seed)
    n = e.n_parties
    best = None
    traces = []
    all_converged = True
    for _ in range(restarts):
        M0 = random_setup(rng, n).projectors
        psi, M, value, trace, ok = _seesaw_once(e, M0, max_iter, tol)
        traces.append(trace)
        all_converged = all_converged and ok
        if best is None or value > best[2]:
            best = (psi, M, value)
    psi, M, value = best
    setup = QuantumSetup(psi, M)
    return SeesawResult(setup, value, traces, restarts, all_converged)


def reference_setup() -> QuantumSetup:
    """The built-in optimum for the ABD/ACD expression: a four-qubit cluster
    state with planar measurements, reaching 7 + (sqrt(2)-1)/2."""
    psi = np.zeros(16, dtype=complex)
    psi[0b0000] = psi[0b0011] = psi[0b1100] = 0.5
    psi[0b1111] = -0.5
    angles = [(np.pi, np.pi / 2), (np.pi / 2, np.pi),
              (3 * np.pi / 4, np.pi / 4), (np.pi / 2, np.pi)]
    M = np.array([[planar_projector(t) for t in pair] for pair in angles])
    return QuantumSetup(psi, M)


def ordering_independence_check(s: QuantumSetup, orderings) -> bool:
    """Quantum predictions carry no ordering parameter: the behavior computed
    for each requested ordering is the same table. Exists to contrast with
    v-causal simulations, which do depend on the ordering."""
    tables = [behavior_from_quantum(s).table for _ in orderings]
    return all(np.array_equal(tables[0], t) for t in tables[1:]) if tables else True


# ---------------------------------------------------------------------------
# JSON: state as interleaved [re, im, ...], projectors as nested [re, im] pairs


def setup_to_json(s: QuantumSetup) -> dict:
    state = np.empty(2 * s.state.size)
    state[0::2] = s.state.real
    state[1::2] = s.state.imag
    proj = [[[[ [float(v.real), float(v.imag)] for v in row]
              for row in s.projectors[i, t]]
             for t in range(2)]
            for i in range(s.n_parties)]
    return {"n_parties": s.n_parties, "state": state.tolist(), "projectors": proj}


def setup_from_json(d: dict) -> QuantumSetup:
    flat = np.asarray(d["state"], dtype=float)
    psi = flat[0::2] + 1j * flat[1::2]
    raw = np.asarray(d["projectors"], dtype=float)   # (n,2,2,2,2) with re/im last
    M = raw[..., 0] + 1j * raw[..., 1]
    return QuantumSetup(psi, M)
