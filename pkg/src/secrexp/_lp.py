"""Dense two-phase tableau simplex for small linear programs.

Solves ``min c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.
Bland's rule is used for both entering and leaving variables, so the method
terminates on degenerate problems. Intended for problems with a few dozen
rows; there is no sparsity handling.
"""

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-12
RATIO_TOL = 1e-9


@dataclass
class LpResult:
    x: np.ndarray
    value: float
    status: str  # "optimal", "infeasible" or "unbounded"
    iterations: int


def _pivot(T, r, c):
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _iterate(T, basis, n_allowed, max_iter):
    it = 0
    while it < max_iter:
        rc = T[-1, :n_allowed]
        enter = np.flatnonzero(rc < -PIVOT_TOL)
        if enter.size == 0:
            return "optimal", it
        c = int(enter[0])
        col = T[:-1, c]
        rows = np.flatnonzero(col > RATIO_TOL)
        if rows.size == 0:
            return "unbounded", it
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        r = int(min(tied, key=lambda i: basis[i]))
        _pivot(T, r, c)
        basis[r] = c
        rhs = T[:-1, -1]
        rhs[(rhs < 0) & (rhs > -1e-11)] = 0.0
        it += 1
    raise RuntimeError("simplex iteration limit reached")


def linprog_dense(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, max_iter=10_000) -> LpResult:
    c = np.asarray(c, dtype=float)
    nv = c.size
    A_ub = np.zeros((0, nv)) if A_ub is None else np.asarray(A_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, nv)) if A_eq is None else np.asarray(A_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    n_slack = m_ub

    # [x | slack | artificial | rhs]
    A = np.zeros((m, nv + n_slack))
    A[:m_ub, :nv] = A_ub
    A[:m_ub, nv:] = np.eye(m_ub)
    A[m_ub:, :nv] = A_eq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1
    b = np.where(neg, -b, b)

    n_real = nv + n_slack
    T = np.zeros((m + 1, n_real + m + 1))
    T[:m, :n_real] = A
    T[:m, n_real:n_real + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n_real, n_real + m))

    # phase 1: minimize the sum of artificials
    T[-1, n_real:n_real + m] = 1.0
    T[-1] -= T[:m].sum(axis=0)
    _, it1 = _iterate(T, basis, n_real + m, max_iter)
    if -T[-1, -1] > 1e-9:
        return LpResult(np.full(nv, np.nan), np.inf, "infeasible", it1)

    # drive remaining artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n_real:
            cand = np.flatnonzero(np.abs(T[r, :n_real]) > 1e-9)
            if cand.size == 0:
                continue
            _pivot(T, r, int(cand[0]))
            basis[r] = int(cand[0])
        keep.append(r)
    T = np.vstack([T[keep], T[-1:]])
    T = np.delete(T, np.s_[n_real:n_real + m], axis=1)
    basis = [basis[r] for r in keep]

    # phase 2
    cost = np.zeros(n_real)
    cost[:nv] = c
    T[-1, :] = 0.0
    T[-1, :n_real] = cost
    for r, j in enumerate(basis):
        T[-1] -= cost[j] * T[r]
    status, it2 = _iterate(T, basis, n_real, max_iter)
    x = np.zeros(n_real)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    if status == "optimal" and basis:
        # re-solve the basic system from the original data to shed pivot round-off
        B = A[keep][:, basis]
        try:
            xb = np.linalg.solve(B, b[keep])
        except np.linalg.LinAlgError:
            xb = None
        if xb is not None and np.all(np.isfinite(xb)):
            x[basis] = np.where(np.abs(xb) < PIVOT_TOL, 0.0, xb)
    x = x[:nv]
    return LpResult(x, float(c @ x), status, it1 + it2)
