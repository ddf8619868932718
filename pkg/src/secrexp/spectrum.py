"""Information spectrum of a code: densities, the exponent function and bounds.

For an induced joint law the information density is
``rho(m, y^n) = log p(y^n|m) - log p(y^n)`` and the exponent function is
``xi(theta) = log E[exp(theta * rho)]`` under ``p(m, y^n) = p(y^n|m) / |M|``.
Pairs with ``p(y^n|m) = 0`` carry no mass and are dropped before any
expectation, so ``-inf`` densities never reach the arithmetic.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._numeric import fsum
from .code import InducedJoint
from .errors import InvalidDelta, InvalidEta, InvalidTheta, NoFeasibleTheta, RateMismatch, ZeroMarginal

RATE_TOL = 1e-9
PROFILE_COLUMNS = ("theta", "xi", "xi1", "xi2", "zeta", "lemma3_bound")


def default_theta_grid(lo=1e-4, hi=8.0, points=61) -> np.ndarray:
    return np.geomspace(lo, hi, points)


@dataclass(frozen=True)
class FiniteRv:
    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        p = np.asarray(self.probs, dtype=float).ravel()
        if v.shape != p.shape or v.size == 0:
            raise ValueError("values and probabilities must be non-empty and of equal length")
        if np.any(p < 0) or abs(fsum(p) - 1.0) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)

    def tail(self, a: float) -> float:
        return fsum(self.probs[self.values >= a])

    def log_mgf(self, theta: float) -> float:
        keep = self.probs > 0
        return float(logsumexp(theta * self.values[keep], b=self.probs[keep]))


@dataclass(frozen=True)
class BoundParams:
    R: float
    eta: float
    theta: float
    n: int
    delta: float | None = None
    Delta: float | None = None

    @classmethod
    def from_delta(cls, R, delta, theta, n):
        """Harness convention: Delta = 4 delta and eta = delta / 2."""
        return cls(R=R, eta=delta / 2, theta=theta, n=n, delta=delta, Delta=4 * delta)


@dataclass(frozen=True)
class Spectrum:
    """Flattened support of p(m, y^n): weights and densities."""

    weights: np.ndarray
    density: np.ndarray
    n: int

    @property
    def log_weights(self) -> np.ndarray:
        return np.log(self.weights)


def spectrum_of(ij: InducedJoint) -> Spectrum:
    pym = ij.p_y_given_m
    mask = pym > 0
    m_idx, y_idx = np.nonzero(mask)
    cond = pym[m_idx, y_idx]
    marg = ij.p_y[y_idx]
    return Spectrum(cond / ij.m_count, np.log(cond) - np.log(marg), ij.n)


def information_density(ij: InducedJoint, m: int, y_index: int) -> float:
    """log p(y^n|m) - log p(y^n); -inf when the conditional vanishes."""
    py = ij.p_y[y_index]
    if py <= 0:
        raise ZeroMarginal(f"p(y^n) = 0 at output index {y_index}")
    cond = ij.p_y_given_m[m, y_index]
    if cond == 0:
        return -math.inf
    return math.log(cond) - math.log(py)


def density_rv(ij: InducedJoint) -> FiniteRv:
    s = spectrum_of(ij)
    return FiniteRv(s.density, s.weights / fsum(s.weights))


def _tilted(spec: Spectrum, theta: float):
    logits = theta * spec.density + spec.log_weights
    log_norm = logsumexp(logits)
    return np.exp(logits - log_norm), log_norm


def _xi(spec: Spectrum, theta: float) -> float:
    if theta == 0:
        return 0.0
    # subtracting log(sum w) keeps xi(0) = 0 despite round-off in the weights
    return float(logsumexp(theta * spec.density + spec.log_weights) - logsumexp(spec.log_weights))


def _derivs(spec: Spectrum, theta: float):
    q, _ = _tilted(spec, theta)
    # pairwise summation: these run once per grid point over the whole support
    mean = float(np.sum(q * spec.density))
    var = float(np.sum(q * (spec.density - mean) ** 2))
    return mean, var


def omega(ij: InducedJoint, theta: float) -> float:
    """log E[(p(Y^n|M) / p(Y^n))^theta] in nats."""
    if theta < 0:
        raise InvalidTheta(f"theta must be >= 0, got {theta}")
    return _xi(spectrum_of(ij), float(theta))


def xi_second_pairwise(spec: Spectrum, theta: float) -> float:
    """Second derivative from the explicit double sum over support pairs.

    ``e^{-2 xi} sum_{a,b} p(a) p(b) (rho(a) - rho(b))^2 / 2 e^{theta(rho(a) + rho(b))}``.
    Quadratic in the support size; the profile uses the equivalent tilted
    variance.
    """
    q, _ = _tilted(spec, theta)
    diff = spec.density[:, None] - spec.density[None, :]
    return float(np.sum(q[:, None] * q[None, :] * diff**2) / 2.0)


@dataclass(frozen=True, eq=False)
class ExponentProfile:
    theta_grid: np.ndarray
    xi: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray
    n: int
    xi1_at_zero: float
    zeta: np.ndarray | None = None
    lemma3_bound: np.ndarray | None = None
    convexity_flags: np.ndarray | None = None

    def xi_at(self, theta: float) -> float:
        """xi at a grid point (exact lookup)."""
        k = int(np.flatnonzero(self.theta_grid == theta)[0])
        return float(self.xi[k])

    def rows(self):
        nan = np.full(self.theta_grid.size, np.nan)
        z = nan if self.zeta is None else self.zeta
        b = nan if self.lemma3_bound is None else self.lemma3_bound
        for k in range(self.theta_grid.size):
            yield (self.theta_grid[k], self.xi[k], self.xi1[k], self.xi2[k], z[k], b[k])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(PROFILE_COLUMNS)
        for row in self.rows():
            w.writerow([format(float(v), ".12g") for v in row])
        return buf.getvalue()


def _check_grid(theta_grid):
    grid = np.asarray(theta_grid, dtype=float).ravel()
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise InvalidTheta("theta grid must be non-empty, positive and strictly ascending")
    return grid


def xi_profile(ij: InducedJoint, theta_grid=None) -> ExponentProfile:
    """xi and its closed-form first two derivatives on a theta grid."""
    grid = _check_grid(default_theta_grid() if theta_grid is None else theta_grid)
    spec = spectrum_of(ij)
    xi = np.array([_xi(spec, t) for t in grid])
    d = np.array([_derivs(spec, t) for t in grid])
    xi1_0, _ = _derivs(spec, 0.0)
    return ExponentProfile(grid, xi, d[:, 0], d[:, 1], ij.n, xi1_0)


def convexity_flags(profile: ExponentProfile, tol=1e-9) -> np.ndarray:
    """Flag grid points where xi'' < -tol or a neighbouring secant check fails."""
    flags = profile.xi2 < -tol
    xi, grid = profile.xi, profile.theta_grid
    # xi(0) = 0 and convexity give xi(t) <= (t/s) xi(s) for 0 < t < s
    ratio = xi[:-1] - grid[:-1] / grid[1:] * xi[1:]
    flags[:-1] |= ratio > tol
    # supporting line at 0
    flags |= xi < grid * profile.xi1_at_zero - tol
    return flags


def chernoff_cramer(rv: FiniteRv, a: float, theta: float):
    """Return ``(bound, exact)`` for Pr{A >= a} <= exp(-(theta a - log E e^{theta A}))."""
    if not theta > 0:
        raise InvalidTheta(f"theta must be > 0, got {theta}")
    expo = theta * (rv.values - a)
    if expo.max() > 700:
        log_b = float(logsumexp(expo, b=rv.probs))
        return (math.exp(log_b) if log_b < 709 else math.inf), rv.tail(a)
    # E[e^{theta(A - a)}] term by term: each term with A >= a is >= its probability,
    # which the cancelling form theta a - log E e^{theta A} does not guarantee
    return fsum(rv.probs * np.exp(expo)), rv.tail(a)


def _check_rate(ij: InducedJoint, R: float):
    if ij.code.rate < R - RATE_TOL:
        raise RateMismatch(f"code rate {ij.code.rate:.12g} is below R = {R:.12g}")


def verdu_han_bound(ij: InducedJoint, R: float, eta: float) -> float:
    """Pr{R <= rho/n + eta} + e^{-n eta}, the probability enumerated exactly."""
    if not eta > 0:
        raise InvalidEta(f"eta must be > 0, got {eta}")
    _check_rate(ij, R)
    spec = spectrum_of(ij)
    n = ij.n
    # compare n R <= rho + n eta to keep the threshold in the density's scale
    hit = spec.density + n * eta >= n * R
    return fsum(spec.weights[hit]) + math.exp(-n * eta)


def lemma3_value(xi_theta: float, n: int, R: float, eta: float, theta: float) -> float:
    return math.exp(n * theta * eta - n * theta * R + xi_theta) + math.exp(-n * eta)


def lemma3_bound(ij: InducedJoint, params: BoundParams) -> float:
    """exp{n[theta eta - theta R + xi(theta)/n]} + e^{-n eta}."""
    if not params.theta > 0:
        raise InvalidTheta(f"theta must be > 0, got {params.theta}")
    if not params.eta > 0:
        raise InvalidEta(f"eta must be > 0, got {params.eta}")
    _check_rate(ij, params.R)
    return lemma3_value(omega(ij, params.theta), ij.n, params.R, params.eta, params.theta)


@dataclass(frozen=True)
class ZetaValues:
    theta: np.ndarray
    values: np.ndarray
    at_zero: float
    slope_at_zero: float


def zeta(profile: ExponentProfile, target: float, Delta: float) -> ZetaValues:
    """zeta(theta) = xi(theta)/n - theta (target + Delta/2) on the profile grid."""
    if not Delta > 0:
        raise InvalidDelta(f"Delta must be > 0, got {Delta}")
    slope = target + Delta / 2
    vals = profile.xi / profile.n - profile.theta_grid * slope
    return ZetaValues(profile.theta_grid, vals, 0.0, profile.xi1_at_zero / profile.n - slope)


def select_theta(profile: ExponentProfile, target: float, Delta: float) -> float:
    """Largest grid theta with zeta(theta) <= 0."""
    z = zeta(profile, target, Delta)
    ok = np.flatnonzero(z.values <= 0)
    if ok.size == 0:
        raise NoFeasibleTheta(
            f"no grid theta has zeta <= 0 (zeta'(0) = {z.slope_at_zero:.6g}); "
            "the target may lie below the code's mutual-information rate"
        )
    return float(profile.theta_grid[ok[-1]])


def with_bounds(profile: ExponentProfile, target: float, Delta: float, R: float, eta: float) -> ExponentProfile:
    """Copy of the profile carrying zeta, the tilted-bound column and convexity flags."""
    z = zeta(profile, target, Delta).values
    b = np.array([lemma3_value(x, profile.n, R, eta, t) for t, x in zip(profile.theta_grid, profile.xi)])
    return ExponentProfile(profile.theta_grid, profile.xi, profile.xi1, profile.xi2, profile.n,
                           profile.xi1_at_zero, z, b, convexity_flags(profile))
