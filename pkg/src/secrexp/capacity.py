"""Single-letter secrecy capacity max I(U;Y) - I(U;Z) over U -> X -> (Y, Z).

The objective is not concave in (p_U, p_{X|U}), so :func:`secrecy_capacity`
reports the best feasible point found by multistart projected-gradient ascent
and never claims global optimality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.special import rel_entr

from ._numeric import fsum
from .channel import Dmc, WiretapChannel
from .code import InducedJoint, receiver_mutual_information
from .errors import ShapeMismatch

LOG_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class AuxiliaryDistribution:
    p_u: np.ndarray
    p_x_given_u: np.ndarray

    def __post_init__(self):
        pu = np.asarray(self.p_u, dtype=float)
        px = np.asarray(self.p_x_given_u, dtype=float)
        if pu.ndim != 1 or px.ndim != 2 or px.shape[0] != pu.size or pu.size == 0:
            raise ShapeMismatch(f"p_u {pu.shape} and p_x_given_u {px.shape} are inconsistent")
        for name, arr in (("p_u", pu[None, :]), ("p_x_given_u", px)):
            if np.any(arr < 0) or np.any(np.abs(arr.sum(axis=1) - 1.0) > 1e-9):
                raise ShapeMismatch(f"{name} rows must be pmfs")
        object.__setattr__(self, "p_u", pu / pu.sum())
        object.__setattr__(self, "p_x_given_u", px / px.sum(axis=1, keepdims=True))

    @property
    def u_size(self) -> int:
        return self.p_u.size

    def to_dict(self) -> dict:
        return {"p_u": self.p_u.tolist(), "p_x_given_u": self.p_x_given_u.tolist()}


@dataclass(frozen=True, eq=False)
class SecrecyCapacityResult:
    value: float
    argmax: AuxiliaryDistribution
    restarts_used: int
    converged: bool
    best_objective_trace: list = field(default_factory=list)
    method: str = "pga"


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 64
    max_iters: int = 5000
    tol: float = 1e-9
    seed: int = 0
    grid_resolution: int = 200
    u_size: int | None = None
    coarse_resolution: int = 10


def _mi_terms(joint, w):
    """I(U; out) for a joint p(u, x) and channel w[x][out]."""
    r = joint @ w
    pu = joint.sum(axis=-1)
    pout = r.sum(axis=-2)
    return np.sum(rel_entr(r, pu[..., :, None] * pout[..., None, :]), axis=(-2, -1))


def _objective(pu, px, wy, wz) -> float:
    joint = pu[:, None] * px
    return float(_mi_terms(joint, wy) - _mi_terms(joint, wz))


def single_letter_objective(ch: WiretapChannel, aux: AuxiliaryDistribution) -> float:
    """I(U;Y) - I(U;Z) in nats under p_U p_{X|U} W."""
    if aux.p_x_given_u.shape[1] != ch.x_size:
        raise ShapeMismatch(f"auxiliary rows cover {aux.p_x_given_u.shape[1]} inputs, channel has {ch.x_size}")
    joint = aux.p_u[:, None] * aux.p_x_given_u
    iy = _mi_exact(joint, ch.bob.p)
    iz = _mi_exact(joint, ch.eve.p)
    return iy - iz


def _mi_exact(joint, w) -> float:
    r = joint @ w
    pu = joint.sum(axis=1)
    pout = r.sum(axis=0)
    return fsum(rel_entr(r, pu[:, None] * pout[None, :]))


def _gradient(pu, px, wy, wz):
    """Gradients of the objective with respect to p_u and p_{x|u}."""
    joint = pu[:, None] * px
    g = np.zeros_like(px)
    for w, sign in ((wy, 1.0), (wz, -1.0)):
        r = joint @ w
        pout = r.sum(axis=0)
        ratio = np.log(np.maximum(r, LOG_FLOOR)) - np.log(np.maximum(pu[:, None] * pout[None, :], LOG_FLOOR))
        # d I / d p(u,x) = sum_out w(out|x) log(p(out|u) / p(out))
        g += sign * (ratio @ w.T)
    return (px * g).sum(axis=1), pu[:, None] * g


def project_simplex(v) -> np.ndarray:
    """Euclidean projection of each row of ``v`` onto the probability simplex."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    k = np.arange(1, v.shape[1] + 1)
    cond = u - css / k > 0
    rho = v.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
    tau = css[np.arange(v.shape[0]), rho] / (rho + 1)
    return np.maximum(v - tau[:, None], 0.0)


def _grad_map(pu, px, wy, wz):
    gu, gx = _gradient(pu, px, wy, wz)
    gm = max(np.max(np.abs(project_simplex(pu + gu)[0] - pu)), np.max(np.abs(project_simplex(px + gx) - px)))
    return gu, gx, gm


def _ascend(pu, px, wy, wz, max_iters, tol):
    """Projected-gradient ascent with Armijo backtracking.

    Converged means the unit-step gradient mapping norm fell below ``tol``.
    Once objective changes drop to round-off level, a trial point is accepted
    only if it shrinks the gradient mapping.
    """
    f = _objective(pu, px, wy, wz)
    gu, gx, gm = _grad_map(pu, px, wy, wz)
    step = 1.0
    for it in range(1, max_iters + 1):
        if gm < tol:
            return pu, px, f, True, it
        noise = 1e-13 * max(1.0, abs(f))
        while True:
            nu = project_simplex(pu + step * gu)[0]
            nx = project_simplex(px + step * gx)
            fn = _objective(nu, nx, wy, wz)
            gain = np.sum(gu * (nu - pu)) + np.sum(gx * (nx - px))
            if fn - f > noise and fn >= f + 1e-4 * gain:
                ngu, ngx, ngm = _grad_map(nu, nx, wy, wz)
                break
            if abs(fn - f) <= noise:
                ngu, ngx, ngm = _grad_map(nu, nx, wy, wz)
                if ngm < 0.9 * gm:
                    break
            step *= 0.5
            if step < 1e-16:
                return pu, px, f, False, it
        pu, px, f = nu, nx, max(f, fn)
        gu, gx, gm = ngu, ngx, ngm
        step = min(step * 2.0, 1e6)
    return pu, px, f, gm < tol, max_iters


def _coarse_starts(nx: int, k: int, res: int):
    """Coarse-grid candidates: U = X with p_X on a lattice, plus the trivial point."""
    starts = []
    for cut in combinations(range(res + nx - 1), nx - 1):
        parts = np.diff((-1,) + cut + (res + nx - 1,)) - 1
        pu = np.zeros(k)
        pu[:nx] = parts / res
        px = np.zeros((k, nx))
        px[np.arange(min(k, nx)), np.arange(min(k, nx))] = 1.0
        if k > nx:
            px[nx:, 0] = 1.0
        starts.append((pu, px))
    return starts


def secrecy_capacity(ch: WiretapChannel, config: SolverConfig | None = None) -> SecrecyCapacityResult:
    """Estimate max_{p in P(W)} I(U;Y) - I(U;Z) with |U| = |X| by default.

    Runs ``config.restarts`` projected-gradient ascents from symmetric
    Dirichlet draws, then refines the best point of a coarse lattice of
    ``U = X`` inputs. The returned value is the objective of the reported
    feasible point and is therefore a lower estimate.
    """
    cfg = config or SolverConfig()
    nx = ch.x_size
    k = cfg.u_size or nx
    wy, wz = ch.bob.p, ch.eve.p
    rng = np.random.default_rng(cfg.seed)

    trivial_pu = np.zeros(k)
    trivial_pu[0] = 1.0
    best_pu, best_px = trivial_pu, np.full((k, nx), 1.0 / nx)
    best_f = _objective(best_pu, best_px, wy, wz)
    trace = []
    all_converged = True

    starts = [(rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(nx), size=k)) for _ in range(cfg.restarts)]
    coarse = _coarse_starts(nx, k, cfg.coarse_resolution) if k >= nx else []
    if coarse:
        scores = [_objective(pu, px, wy, wz) for pu, px in coarse]
        starts.append(coarse[int(np.argmax(scores))])

    for pu0, px0 in starts:
        pu, px, f, conv, _ = _ascend(pu0, px0, wy, wz, cfg.max_iters, cfg.tol)
        all_converged &= conv
        # improvements at round-off level would let the value dip below the exact 0
        if f > best_f + 1e-14:
            best_pu, best_px, best_f = pu, px, f
        trace.append(best_f)

    aux = AuxiliaryDistribution(best_pu, best_px)
    value = single_letter_objective(ch, aux)
    return SecrecyCapacityResult(value, aux, len(starts), all_converged, trace)


def _lattice(k: int, res: int) -> np.ndarray:
    pts = []
    for cut in combinations(range(res + k - 1), k - 1):
        pts.append(np.diff((-1,) + cut + (res + k - 1,)) - 1)
    return np.array(pts, dtype=float) / res


def grid_oracle(ch: WiretapChannel, resolution: int = 200, u_size: int | None = None,
                max_points: int = 50_000_000) -> SecrecyCapacityResult:
    """Exhaustive lattice search over (p_U, p_{X|U}); independent of the gradient solver.

    Every simplex is discretized with step 1/resolution. Practical for binary
    inputs (resolution 200 gives 201^3 points); larger alphabets hit
    ``max_points`` quickly.
    """
    nx = ch.x_size
    k = u_size or nx
    wy, wz = ch.bob.p, ch.eve.p
    pu_lat = _lattice(k, resolution)
    row_lat = _lattice(nx, resolution)
    total = pu_lat.shape[0] * row_lat.shape[0] ** k
    if total > max_points:
        raise ValueError(f"grid oracle would evaluate {total} points (limit {max_points})")
    # all combinations of rows, one row per u
    rows = np.stack(np.meshgrid(*[np.arange(row_lat.shape[0])] * k, indexing="ij"), axis=-1).reshape(-1, k)
    px_all = row_lat[rows]  # (R, k, nx)
    best = (-math.inf, None, None)
    for pu in pu_lat:
        joint = pu[None, :, None] * px_all
        vals = _mi_terms(joint, wy) - _mi_terms(joint, wz)
        j = int(np.argmax(vals))
        if vals[j] > best[0]:
            best = (float(vals[j]), pu, px_all[j])
    aux = AuxiliaryDistribution(best[1], best[2])
    return SecrecyCapacityResult(single_letter_objective(ch, aux), aux, 0, True, [], method="grid")


def blahut_arimoto(dmc: Dmc, tol: float = 1e-12, max_iters: int = 100_000):
    """Capacity (nats) and capacity-achieving input of a DMC."""
    w = dmc.p
    p = np.full(dmc.in_size, 1.0 / dmc.in_size)
    lower = 0.0
    for _ in range(max_iters):
        q = p @ w
        d = np.sum(rel_entr(w, q[None, :]), axis=1)
        lower = float(p @ d)
        upper = float(d.max())
        if upper - lower < tol:
            break
        p = p * np.exp(d - d.max())
        p /= p.sum()
    return lower, p


def input_mutual_information(dmc: Dmc, p_x) -> float:
    """I(X; out) for input pmf ``p_x``."""
    p_x = np.asarray(p_x, dtype=float)
    return _mi_exact(np.diag(p_x), dmc.p)


def weak_converse_margin(ch: WiretapChannel, ij: InducedJoint, cs_value: float) -> float:
    """cs_value - (1/n)[I(M;Y^n) - I(M;Z^n)]; nonnegative up to solver error."""
    iy = receiver_mutual_information(ij, "bob")
    iz = receiver_mutual_information(ij, "eve")
    return cs_value - (iy - iz) / ij.n
