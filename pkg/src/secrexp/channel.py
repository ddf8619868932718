"""Discrete memoryless wiretap channels W(y, z | x).

Sequences of symbols are indexed as base-|alphabet| integers with the first
symbol most significant (see :func:`sequence_to_index`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from os import PathLike

import numpy as np

from ._lp import linprog_dense
from ._numeric import ROW_TOL, check_stochastic_rows
from .errors import (
    IndexOutOfRange,
    LengthMismatch,
    NegativeProbability,
    RowSumViolation,
    ShapeMismatch,
)

BOB = "bob"
EVE = "eve"
DEGRADED_TOL = 1e-9


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dmc:
    """Single-output discrete memoryless channel, ``p[in][out]``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 2 or 0 in p.shape:
            raise ShapeMismatch(f"DMC table must be a non-empty matrix, got shape {p.shape}")
        p, _ = check_stochastic_rows(p, ROW_TOL, RowSumViolation, NegativeProbability)
        object.__setattr__(self, "p", _frozen(p))

    @property
    def in_size(self) -> int:
        return self.p.shape[0]

    @property
    def out_size(self) -> int:
        return self.p.shape[1]


@dataclass(frozen=True, eq=False)
class WiretapChannel:
    """Conditional law ``w[x][y][z]`` of Bob's output y and Eve's output z.

    Rows are validated to within 1e-9 and then renormalized exactly.
    ``input_residual`` records the largest row-sum deviation of the table as
    supplied.
    """

    w: np.ndarray
    input_residual: float = field(default=0.0, compare=False)

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 3 or 0 in w.shape:
            raise ShapeMismatch(f"channel table must be indexed [x][y][z], got shape {w.shape}")
        w, resid = check_stochastic_rows(w, ROW_TOL, RowSumViolation, NegativeProbability, what="channel row x")
        object.__setattr__(self, "w", _frozen(w))
        object.__setattr__(self, "input_residual", resid)

    @property
    def x_size(self) -> int:
        return self.w.shape[0]

    @property
    def y_size(self) -> int:
        return self.w.shape[1]

    @property
    def z_size(self) -> int:
        return self.w.shape[2]

    @property
    def bob(self) -> Dmc:
        return marginal(self, BOB)

    @property
    def eve(self) -> Dmc:
        return marginal(self, EVE)

    def to_dict(self) -> dict:
        return {"x_size": self.x_size, "y_size": self.y_size, "z_size": self.z_size, "w": self.w.tolist()}

    @classmethod
    def from_marginals(cls, bob, eve) -> "WiretapChannel":
        """Channel with outputs conditionally independent given x."""
        bob, eve = np.asarray(bob, dtype=float), np.asarray(eve, dtype=float)
        if bob.shape[0] != eve.shape[0]:
            raise ShapeMismatch("Bob and Eve marginals disagree on the input alphabet")
        return cls(bob[:, :, None] * eve[:, None, :])

    @classmethod
    def degraded(cls, bob, post) -> "WiretapChannel":
        """Physically degraded channel W(y,z|x) = W_Y(y|x) V(z|y)."""
        bob, post = np.asarray(bob, dtype=float), np.asarray(post, dtype=float)
        if bob.shape[1] != post.shape[0]:
            raise ShapeMismatch("post-processing channel must take Bob's output as input")
        return cls(bob[:, :, None] * post[None, :, :])


def bsc(p: float) -> np.ndarray:
    return np.array([[1.0 - p, p], [p, 1.0 - p]])


def bsc_pair(p_bob: float, p_eve: float) -> WiretapChannel:
    """Binary symmetric channels to Bob and Eve with independent noise."""
    return WiretapChannel.from_marginals(bsc(p_bob), bsc(p_eve))


def load_channel(spec) -> WiretapChannel:
    """Build a channel from a mapping, a JSON string, or a path to a JSON file.

    The mapping must carry ``x_size``, ``y_size``, ``z_size`` and ``w``
    (nested lists indexed ``[x][y][z]``).
    """
    if isinstance(spec, (str, PathLike)):
        text = str(spec)
        if isinstance(spec, PathLike) or not text.lstrip().startswith("{"):
            with open(spec) as fh:
                spec = json.load(fh)
        else:
            spec = json.loads(text)
    for key in ("x_size", "y_size", "z_size", "w"):
        if key not in spec:
            raise ShapeMismatch(f"channel description is missing '{key}'")
    sizes = tuple(int(spec[k]) for k in ("x_size", "y_size", "z_size"))
    if min(sizes) < 1:
        raise ShapeMismatch(f"alphabet sizes must be >= 1, got {sizes}")
    try:
        w = np.array(spec["w"], dtype=float)
    except ValueError as exc:
        raise ShapeMismatch(f"w is not a rectangular table: {exc}") from None
    if w.shape != sizes:
        raise ShapeMismatch(f"w has shape {w.shape}, declared sizes are {sizes}")
    return WiretapChannel(w)


def marginal(ch: WiretapChannel, receiver: str) -> Dmc:
    receiver = receiver.lower()
    if receiver == BOB:
        return Dmc(ch.w.sum(axis=2))
    if receiver == EVE:
        return Dmc(ch.w.sum(axis=1))
    raise ValueError(f"receiver must be 'bob' or 'eve', got {receiver!r}")


def sequence_to_index(seq, base: int) -> int:
    idx = 0
    for s in seq:
        idx = idx * base + int(s)
    return idx


def index_to_sequence(index: int, base: int, n: int) -> tuple:
    out = []
    for _ in range(n):
        index, r = divmod(index, base)
        out.append(r)
    return tuple(reversed(out))


def sequence_digits(n: int, base: int) -> np.ndarray:
    """All base-``base`` sequences of length ``n`` as rows, in index order."""
    idx = np.arange(base**n)
    powers = base ** np.arange(n - 1, -1, -1)
    return (idx[:, None] // powers[None, :]) % base


def product_law(ch: WiretapChannel, x_seq, y_seq, z_seq) -> float:
    """Memoryless n-fold law: prod_t w[x_t][y_t][z_t]."""
    n = len(x_seq)
    if n < 1 or len(y_seq) != n or len(z_seq) != n:
        raise LengthMismatch(f"sequence lengths differ or are empty: {len(x_seq)}, {len(y_seq)}, {len(z_seq)}")
    for seq, size, name in ((x_seq, ch.x_size, "x"), (y_seq, ch.y_size, "y"), (z_seq, ch.z_size, "z")):
        for s in seq:
            if not 0 <= int(s) < size:
                raise IndexOutOfRange(f"{name} symbol {s} outside alphabet of size {size}")
    prob = 1.0
    for x, y, z in zip(x_seq, y_seq, z_seq):
        prob *= ch.w[int(x), int(y), int(z)]
    return prob


def sequence_law(dmc: Dmc, x_seq, y_seq) -> float:
    """n-fold law of a single-output DMC."""
    if len(x_seq) != len(y_seq) or len(x_seq) < 1:
        raise LengthMismatch(f"sequence lengths differ or are empty: {len(x_seq)}, {len(y_seq)}")
    prob = 1.0
    for x, y in zip(x_seq, y_seq):
        if not (0 <= int(x) < dmc.in_size and 0 <= int(y) < dmc.out_size):
            raise IndexOutOfRange(f"symbol pair ({x}, {y}) outside alphabets")
        prob *= dmc.p[int(x), int(y)]
    return prob


@dataclass(frozen=True, eq=False)
class DegradednessReport:
    degraded: bool
    witness: Dmc | None
    residual: float


def degradation_residual(ch: WiretapChannel, post) -> float:
    """max_{x,z} |W_Z(z|x) - sum_y V(z|y) W_Y(y|x)|."""
    post = np.asarray(post, dtype=float)
    return float(np.max(np.abs(ch.eve.p - ch.bob.p @ post)))


def degradedness_check(ch: WiretapChannel) -> DegradednessReport:
    """Decide stochastic degradedness: does some V: Y -> Z give W_Z = V o W_Y?

    Solves ``min t`` over row-stochastic V with ``|W_Z - W_Y V| <= t``
    entrywise. The witness is the LP optimum with its rows re-projected to be
    exactly stochastic; the residual is recomputed from that witness.
    """
    wy, wz = ch.bob.p, ch.eve.p
    nx, ny, nz = ch.x_size, ch.y_size, ch.z_size
    nv = ny * nz
    # variables: V[y, z] flattened row-major, then t
    c = np.zeros(nv + 1)
    c[-1] = 1.0
    rows, rhs = [], []
    for x in range(nx):
        for z in range(nz):
            coef = np.zeros(nv + 1)
            coef[z:nv:nz] = wy[x]
            up = coef.copy()
            up[-1] = -1.0
            rows.append(up)
            rhs.append(wz[x, z])
            lo = -coef
            lo[-1] = -1.0
            rows.append(lo)
            rhs.append(-wz[x, z])
    a_eq = np.zeros((ny, nv + 1))
    for y in range(ny):
        a_eq[y, y * nz:(y + 1) * nz] = 1.0
    res = linprog_dense(c, np.array(rows), np.array(rhs), a_eq, np.ones(ny))
    if res.status != "optimal":
        raise RuntimeError(f"degradedness LP ended with status {res.status}")
    v = np.clip(res.x[:nv].reshape(ny, nz), 0.0, None)
    v /= v.sum(axis=1, keepdims=True)
    residual = degradation_residual(ch, v)
    if residual <= DEGRADED_TOL:
        return DegradednessReport(True, Dmc(v), residual)
    return DegradednessReport(False, None, residual)
