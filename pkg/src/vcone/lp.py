"""Embedded two-phase simplex (Bland's rule) with an exact rational path.

No external solver: certificates are the product here, so the solver is
self-contained and reproducible. The float path runs a dense tableau whose
pivot loop is numba-compiled (pure-numpy fallback via VCONE_NO_NUMBA). The
rational path certifies the float-optimal basis exactly (gmpy2.mpq when
available, fractions.Fraction otherwise) and, if the float basis fails the
exact optimality conditions, repairs it by exact Bland pivoting.

Problems are stated as: maximize c.v subject to A_eq v = b_eq,
A_ub v <= b_ub, v >= 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._accel import maybe_njit
from .errors import InvalidInputError

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-10
DEFAULT_MAXITER = 200_000

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
FAILED = "failed"


@dataclass
class LinearProgram:
    c: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.atleast_1d(np.asarray(self.c, dtype=float))
        n = self.c.size
        for name in ("A_eq", "A_ub"):
            A = getattr(self, name)
            if A is not None:
                A = np.atleast_2d(np.asarray(A, dtype=float))
                if A.shape[1] != n:
                    raise InvalidInputError(f"{name} has {A.shape[1]} columns, objective has {n}")
                setattr(self, name, A)
        for Aname, bname in (("A_eq", "b_eq"), ("A_ub", "b_ub")):
            A, b = getattr(self, Aname), getattr(self, bname)
            if (A is None) != (b is None):
                raise InvalidInputError(f"{Aname} and {bname} must be given together")
            if b is not None:
                b = np.atleast_1d(np.asarray(b, dtype=float))
                if b.size != A.shape[0]:
                    raise InvalidInputError(f"{bname} length mismatch")
                setattr(self, bname, b)
        if self.A_eq is None and self.A_ub is None:
            raise InvalidInputError("at least one constraint block is required")


@dataclass
class LPResult:
    status: str
    value: float | None = None
    x: np.ndarray | None = None
    duals: np.ndarray | None = None        # per original row: [eq rows, ub rows]
    farkas: np.ndarray | None = None       # infeasibility certificate: farkas.A <= 0, farkas.b > 0
    exact_value: Fraction | None = None
    exact_x: list | None = None
    exact_duals: list | None = None
    iterations: int = 0
    residuals: dict = field(default_factory=dict)


def _pivot_loop(T, basis, allowed, tol, maxiter):
    """Bland's rule simplex on a dense tableau.

    Last row holds reduced costs and -objective; last column the rhs.
    Returns (code, iterations): 0 optimal, 1 unbounded, 2 iteration cap.
    """
    m = T.shape[0] - 1
    ncols = T.shape[1] - 1
    it = 0
    while it < maxiter:
        enter = -1
        for j in range(ncols):
            if allowed[j] and T[m, j] > tol:
                enter = j
                break
        if enter == -1:
            return 0, it
        leave = -1
        best_ratio = 0.0
        best_basis = 0
        found = False
        for i in range(m):
            a = T[i, enter]
            if a > 1e-10:
                ratio = T[i, ncols] / a
                if (not found or ratio < best_ratio - 1e-12 or
                        (ratio <= best_ratio + 1e-12 and basis[i] < best_basis)):
                    found = True
                    best_ratio = ratio
                    leave = i
                    best_basis = basis[i]
        if not found:
            return 1, it
        piv = T[leave, enter]
        for j in range(ncols + 1):
            T[leave, j] /= piv
        for i in range(m + 1):
            if i != leave:
                f = T[i, enter]
                if f != 0.0:
                    for j in range(ncols + 1):
                        T[i, j] -= f * T[leave, j]
        basis[leave] = enter
        it += 1
    return 2, it


_pivot_loop_jit = maybe_njit(_pivot_loop)


def _standardize(lp: LinearProgram):
    """Equality standard form with slacks; rows sign-flipped so b >= 0."""
    n = lp.c.size
    blocks, rhs = [], []
    m_eq = 0
    if lp.A_eq is not None:
        blocks.append(lp.A_eq)
        rhs.append(lp.b_eq)
        m_eq = lp.A_eq.shape[0]
    m_ub = 0
    if lp.A_ub is not None:
        blocks.append(lp.A_ub)
        rhs.append(lp.b_ub)
        m_ub = lp.A_ub.shape[0]
    A = np.vstack(blocks)
    b = np.concatenate(rhs)
    m = A.shape[0]
    if m_ub:
        S = np.zeros((m, m_ub))
        S[m_eq:, :] = np.eye(m_ub)
        A = np.hstack([A, S])
    c = np.concatenate([lp.c, np.zeros(m_ub)])
    signs = np.where(b < 0, -1.0, 1.0)
    A = A * signs[:, None]
    b = b * signs
    return A, b, c, signs, n, m_eq, m_ub


def _phase_objective_row(T, basis, c_std, N):
    """Reduced costs c_j - c_B . T[:, j]; last cell -objective."""
    m = T.shape[0] - 1
    cb = np.array([c_std[basis[i]] if basis[i] < N else 0.0 for i in range(m)])
    T[m, :] = 0.0
    T[m, :N] = c_std[:N] - cb @ T[:m, :N]
    # artificial columns keep reduced cost 0 - cb . col
    T[m, N:-1] = -cb @ T[:m, N:-1]
    T[m, -1] = -(cb @ T[:m, -1])


def solve_lp(lp: LinearProgram, rational: bool = False,
             maxiter: int = DEFAULT_MAXITER) -> LPResult:
    A, b, c, signs, n_orig, m_eq, m_ub = _standardize(lp)
    m, N = A.shape
    # tableau: [A | I_art | b], objective row last
    T = np.zeros((m + 1, N + m + 1))
    T[:m, :N] = A
    T[:m, N:N + m] = np.eye(m)
    T[:m, -1] = b
    basis = np.arange(N, N + m, dtype=np.int64)
    allowed = np.ones(N + m, dtype=np.bool_)
    allowed[N:] = False

    # phase 1: maximize -(sum of artificials)
    T[m, :N] = T[:m, :N].sum(axis=0)
    T[m, N:-1] = 0.0
    T[m, -1] = T[:m, -1].sum()
    code, it1 = _pivot_loop_jit(T, basis, allowed, 1e-9, maxiter)
    if code == 2:
        return LPResult(FAILED, iterations=it1)
    scale = max(1.0, np.abs(b).max())
    if T[m, -1] > FEAS_TOL * scale:
        y = _duals_from_basis(A, basis, np.where(basis >= N, -1.0, 0.0), N, m,
                              phase1=True)
        farkas = -(y * signs)
        res = LPResult(INFEASIBLE, farkas=farkas, iterations=it1)
        if rational:
            res = _exact_path(lp, res, A, b, c, signs, basis, allowed, n_orig, maxiter)
        return res

    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= N:
            for j in range(N):
                if allowed[j] and abs(T[i, j]) > 1e-7:
                    _single_pivot(T, basis, i, j)
                    break

    # phase 2
    _phase_objective_row(T, basis, c, N)
    code, it2 = _pivot_loop_jit(T, basis, allowed, 1e-9, maxiter)
    iterations = it1 + it2
    if code == 2:
        return LPResult(FAILED, iterations=iterations)
    if code == 1:
        return LPResult(UNBOUNDED, iterations=iterations)

    x_std = np.zeros(N)
    for i in range(m):
        if basis[i] < N:
            x_std[basis[i]] = T[i, -1]
    x = x_std[:n_orig]
    value = float(c @ x_std)
    cb = np.array([c[basis[i]] if basis[i] < N else 0.0 for i in range(m)])
    y = _duals_from_basis(A, basis, cb, N, m)
    duals = y * signs

    residuals = _check_optimal(A, b, c, x_std, y, value)
    status = OPTIMAL if residuals["ok"] else FAILED
    res = LPResult(status, value=value, x=x, duals=duals,
                   iterations=iterations, residuals=residuals)
    if rational:
        res = _exact_path(lp, res, A, b, c, signs, basis, allowed, n_orig, maxiter)
    return res


def _single_pivot(T, basis, row, col):
    piv = T[row, col]
    T[row, :] /= piv
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i, :] -= T[i, col] * T[row, :]
    basis[row] = col


def _duals_from_basis(A, basis, cb, N, m, phase1=False):
    """Solve B^T y = c_B; artificial basis columns are unit vectors."""
    B = np.zeros((m, m))
    for i, bi in enumerate(basis):
        if bi < N:
            B[:, i] = A[:, bi]
        else:
            B[bi - N, i] = 1.0
    try:
        return np.linalg.solve(B.T, cb)
    except np.linalg.LinAlgError:  # pragma: no cover
        return np.linalg.lstsq(B.T, cb, rcond=None)[0]


def _check_optimal(A, b, c, x_std, y, value):
    primal = float(np.abs(A @ x_std - b).max()) if A.size else 0.0
    scale = max(1.0, float(np.abs(b).max()), float(np.abs(c).max()))
    reduced = float((c - y @ A).max())
    gap = abs(value - float(y @ b))
    ok = (primal <= FEAS_TOL * scale and x_std.min() >= -FEAS_TOL * scale
          and reduced <= 1e-7 * scale and gap <= 1e-7 * scale)
    return {"ok": bool(ok), "primal": primal, "reduced_cost": reduced,
            "duality_gap": gap}


# ---------------------------------------------------------------------------
# exact rational path


def _to_q(a):
    return [[_Q(float(v)) for v in row] for row in a]


def _solve_exact(Bq, rhs_cols):
    """Gaussian elimination over rationals; rhs_cols is a list of columns."""
    m = len(Bq)
    M = [row[:] + [col[i] for col in rhs_cols] for i, row in enumerate(Bq)]
    ncols = m + len(rhs_cols)
    for k in range(m):
        piv = None
        for i in range(k, m):
            if M[i][k] != 0:
                piv = i
                break
        if piv is None:
            raise np.linalg.LinAlgError("singular exact basis")
        M[k], M[piv] = M[piv], M[k]
        inv = 1 / M[k][k]
        M[k] = [v * inv for v in M[k]]
        for i in range(m):
            if i != k and M[i][k] != 0:
                f = M[i][k]
                M[i] = [vi - f * vk for vi, vk in zip(M[i], M[k])]
    return [[M[i][m + j] for i in range(m)] for j in range(len(rhs_cols))]


def _exact_path(lp, float_res, A, b, c, signs, basis, allowed, n_orig, maxiter):
    """Certify (or repair) the float result with exact rational arithmetic."""
    m, N = A.shape
    Aq = _to_q(A)
    bq = [_Q(float(v)) for v in b]
    cq = [_Q(float(v)) for v in c]
    if float_res.status not in (OPTIMAL, INFEASIBLE):
        return float_res

    if float_res.status == OPTIMAL:
        res = _exact_certify(float_res, Aq, bq, cq, basis, N, m, n_orig, signs)
        if res is not None:
            return res
    # float basis not exactly optimal (or float said infeasible): full exact solve
    return _exact_simplex(lp, float_res, Aq, bq, cq, N, m, n_orig, signs, maxiter)


def _basis_cols(Aq, basis, N, m):
    cols = []
    for bi in basis:
        if bi < N:
            cols.append([Aq[i][bi] for i in range(m)])
        else:
            col = [_Q(0)] * m
            col[bi - N] = _Q(1)
            cols.append(col)
    return cols


def _exact_certify(float_res, Aq, bq, cq, basis, N, m, n_orig, signs):
    """Exact primal/dual solve for the float basis; None if conditions fail."""
    cols = _basis_cols(Aq, basis, N, m)
    Bq = [[cols[j][i] for j in range(m)] for i in range(m)]
    try:
        (xB,) = _solve_exact(Bq, [bq])
    except np.linalg.LinAlgError:
        return None
    if any(v < 0 for v in xB):
        return None
    cB = [cq[bi] if bi < N else _Q(0) for bi in basis]
    BqT = [[Bq[j][i] for j in range(m)] for i in range(m)]
    (y,) = _solve_exact(BqT, [cB])
    for j in range(N):
        red = cq[j] - sum(y[i] * Aq[i][j] for i in range(m))
        if red > 0:
            return None
    value = sum(ci * xi for ci, xi in zip(cB, xB))
    x = [_Q(0)] * N
    for bi, xi in zip(basis, xB):
        if bi < N:
            x[bi] = xi
    float_res.exact_value = Fraction(value)
    float_res.exact_x = [Fraction(v) for v in x[:n_orig]]
    float_res.exact_duals = [Fraction(yi) * int(s) for yi, s in zip(y, signs)]
    float_res.value = float(float_res.exact_value)
    return float_res


def _exact_simplex(lp, float_res, Aq, bq, cq, N, m, n_orig, signs, maxiter):
    """Plain exact two-phase tableau simplex with Bland's rule."""
    ncols = N + m
    T = [[_Q(0)] * (ncols + 1) for _ in range(m + 1)]
    for i in range(m):
        for j in range(N):
            T[i][j] = Aq[i][j]
        T[i][N + i] = _Q(1)
        T[i][ncols] = bq[i]
    basis = list(range(N, N + m))
    allowed = [True] * N + [False] * m

    def pivot(row, col):
        piv = T[row][col]
        T[row] = [v / piv for v in T[row]]
        for i in range(m + 1):
            if i != row and T[i][col] != 0:
                f = T[i][col]
                T[i] = [vi - f * vk for vi, vk in zip(T[i], T[row])]
        basis[row] = col

    def bland(maxit):
        it = 0
        while it < maxit:
            enter = -1
            for j in range(ncols):
                if allowed[j] and T[m][j] > 0:
                    enter = j
                    break
            if enter == -1:
                return 0
            leave, best, bestb = -1, None, None
            for i in range(m):
                if T[i][enter] > 0:
                    ratio = T[i][ncols] / T[i][enter]
                    if best is None or ratio < best or (ratio == best and basis[i] < bestb):
                        best, leave, bestb = ratio, i, basis[i]
            if leave == -1:
                return 1
            pivot(leave, enter)
            it += 1
        return 2

    # phase 1
    for j in range(ncols + 1):
        T[m][j] = sum(T[i][j] for i in range(m)) if j < N or j == ncols else _Q(0)
    code = bland(maxiter)
    if code != 0:
        return LPResult(FAILED)
    if T[m][ncols] > 0:
        cB = [_Q(-1) if bi >= N else _Q(0) for bi in basis]
        cols = _basis_cols(Aq, basis, N, m)
        BqT = [list(col) for col in cols]   # row k of B^T is basis column k
        (y,) = _solve_exact(BqT, [cB])
        farkas = np.array([-float(Fraction(yi)) * s for yi, s in zip(y, signs)])
        return LPResult(INFEASIBLE, farkas=farkas)
    for i in range(m):
        if basis[i] >= N:
            for j in range(N):
                if allowed[j] and T[i][j] != 0:
                    pivot(i, j)
                    break
    # phase 2
    cB = [cq[bi] if bi < N else _Q(0) for bi in basis]
    for j in range(ncols):
        zj = sum(cB[i] * T[i][j] for i in range(m))
        T[m][j] = (cq[j] if j < N else _Q(0)) - zj
    T[m][ncols] = -sum(cB[i] * T[i][ncols] for i in range(m))
    code = bland(maxiter)
    if code == 1:
        return LPResult(UNBOUNDED)
    if code == 2:
        return LPResult(FAILED)
    x = [_Q(0)] * N
    for i in range(m):
        if basis[i] < N:
            x[basis[i]] = T[i][ncols]
    value = sum(cq[j] * x[j] for j in range(N))
    cB = [cq[bi] if bi < N else _Q(0) for bi in basis]
    cols = _basis_cols(Aq, basis, N, m)
    BqT = [list(col) for col in cols]
    (y,) = _solve_exact(BqT, [cB])
    res = LPResult(OPTIMAL, value=float(Fraction(value)),
                   x=np.array([float(Fraction(v)) for v in x[:n_orig]]),
                   duals=np.array([float(Fraction(yi)) * s for yi, s in zip(y, signs)]))
    res.exact_value = Fraction(value)
    res.exact_x = [Fraction(v) for v in x[:n_orig]]
    res.exact_duals = [Fraction(yi) * int(s) for yi, s in zip(y, signs)]
    res.residuals = {"ok": True, "primal": 0.0, "reduced_cost": 0.0, "duality_gap": 0.0}
    return res


# ---------------------------------------------------------------------------
# JSON serialization for audit


def lp_to_json(lp: LinearProgram) -> dict:
    d = {"objective": lp.c.tolist()}
    if lp.A_eq is not None:
        d["A_eq"] = lp.A_eq.tolist()
        d["b_eq"] = lp.b_eq.tolist()
    if lp.A_ub is not None:
        d["A_ub"] = lp.A_ub.tolist()
        d["b_ub"] = lp.b_ub.tolist()
    return d


def result_to_json(res: LPResult) -> dict:
    d = {"status": res.status, "value": res.value, "iterations": res.iterations,
         "residuals": res.residuals}
    if res.x is not None:
        d["x"] = np.asarray(res.x).tolist()
    if res.duals is not None:
        d["duals"] = np.asarray(res.duals).tolist()
    if res.farkas is not None:
        d["farkas"] = np.asarray(res.farkas).tolist()
    if res.exact_value is not None:
        d["exact_value"] = str(res.exact_value)
    return d
