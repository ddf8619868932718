"""Wiretap codes, their induced output distributions, and exact code metrics.

Messages are uniform on {0, ..., m_count-1}. Codewords and output sequences
are addressed by their base-|alphabet| index (first symbol most significant),
matching :func:`secrexp.channel.sequence_to_index`.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from os import PathLike

import numpy as np

from ._numeric import compensated_rowsum, fsum, mutual_information
from .channel import BOB, EVE, Dmc, WiretapChannel
from .errors import (
    DecoderDomainIncomplete,
    EncoderRowSumViolation,
    EnumerationTooLarge,
    IndexOutOfRange,
    InvalidRate,
    ShapeMismatch,
)

ENUMERATION_CAP = 2**24
ENCODER_TOL = 1e-9


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SECREXP_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class WiretapCode:
    """Stochastic encoder phi(x^n | m) and deterministic decoder psi(y^n).

    ``encoder[m]`` is a tuple of ``(codeword_index, probability)`` pairs with
    distinct, sorted indices. ``decoder`` is an int array over Bob's output
    indices, or ``None`` until one is attached with :meth:`with_decoder`.
    """

    n: int
    m_count: int
    encoder: tuple
    decoder: np.ndarray | None = None

    @property
    def rate(self) -> float:
        return math.log(self.m_count) / self.n

    def with_decoder(self, decoder) -> "WiretapCode":
        return build_code(self.n, self.m_count, self.encoder, decoder)

    def encoder_matrix(self, x_size: int) -> np.ndarray:
        """Dense |M| x |X|^n encoder table (only for small instances)."""
        mat = np.zeros((self.m_count, x_size**self.n))
        for m, row in enumerate(self.encoder):
            for idx, p in row:
                mat[m, idx] = p
        return mat

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "m_count": self.m_count,
            "encoder": [[[int(i), float(p)] for i, p in row] for row in self.encoder],
        }
        if self.decoder is not None:
            out["decoder"] = self.decoder.tolist()
        return out


@dataclass(frozen=True)
class RateSpec:
    rate: float
    n: int

    @classmethod
    def from_code(cls, code: WiretapCode) -> "RateSpec":
        return cls(code.rate, code.n)


def _normalize_encoder(m_count, encoder, x_count=None):
    if len(encoder) != m_count:
        raise ShapeMismatch(f"encoder has {len(encoder)} rows for {m_count} messages")
    rows = []
    for m, row in enumerate(encoder):
        if isinstance(row, dict):
            row = row.items()
        merged = {}
        for idx, p in row:
            idx = int(idx)
            p = float(p)
            if idx < 0 or (x_count is not None and idx >= x_count):
                raise IndexOutOfRange(f"message {m}: codeword index {idx} out of range")
            if not math.isfinite(p) or p < 0:
                raise EncoderRowSumViolation(f"message {m}: invalid probability {p!r}")
            merged[idx] = merged.get(idx, 0.0) + p
        total = math.fsum(merged.values())
        if abs(total - 1.0) > ENCODER_TOL:
            raise EncoderRowSumViolation(f"encoder row {m} sums to {total!r}")
        rows.append(tuple((i, merged[i] / total) for i in sorted(merged) if merged[i] > 0))
    return tuple(rows)


def build_code(n, m_count, encoder, decoder=None, *, x_size=None, y_size=None) -> WiretapCode:
    """Validate and assemble a code.

    Alphabet sizes are optional here; when given, codeword and output indices
    are range-checked against them. :func:`induced_joint` always re-checks
    against the channel.
    """
    n, m_count = int(n), int(m_count)
    if n < 1 or m_count < 1:
        raise ShapeMismatch(f"need n >= 1 and m_count >= 1, got n={n}, m_count={m_count}")
    x_count = None if x_size is None else x_size**n
    rows = _normalize_encoder(m_count, encoder, x_count)
    dec = None
    if decoder is not None:
        dec = np.asarray(decoder)
        if dec.ndim != 1:
            raise ShapeMismatch("decoder must be a flat array of message indices")
        if y_size is not None and dec.size != y_size**n:
            raise DecoderDomainIncomplete(f"decoder covers {dec.size} of {y_size**n} output sequences")
        if dec.size and (dec.min() < 0 or dec.max() >= m_count):
            raise IndexOutOfRange("decoder maps an output to a nonexistent message")
        dec = dec.astype(np.int64)
        dec.setflags(write=False)
    return WiretapCode(n, m_count, rows, dec)


def load_code(spec, channel: WiretapChannel | None = None) -> WiretapCode:
    """Read a code from a mapping, JSON string or file path.

    When ``decoder`` is absent and a channel is supplied, the MAP decoder for
    that channel is attached.
    """
    if isinstance(spec, (str, PathLike)):
        text = str(spec)
        if isinstance(spec, PathLike) or not text.lstrip().startswith("{"):
            with open(spec) as fh:
                spec = json.load(fh)
        else:
            spec = json.loads(text)
    for key in ("n", "m_count", "encoder"):
        if key not in spec:
            raise ShapeMismatch(f"code description is missing '{key}'")
    sizes = {}
    if channel is not None:
        sizes = {"x_size": channel.x_size, "y_size": channel.y_size}
    code = build_code(spec["n"], spec["m_count"], spec["encoder"], spec.get("decoder"), **sizes)
    if code.decoder is None and channel is not None:
        code = code.with_decoder(map_decoder(channel, code.n, code.m_count, code.encoder))
    return code


def _check_cap(size: int, n: int, cap: int, what: str):
    if size**n > cap:
        raise EnumerationTooLarge(f"|{what}|^n = {size}^{n} exceeds the enumeration cap {cap}")


def codeword_likelihoods(dmc: Dmc, n: int, codewords) -> np.ndarray:
    """Rows ``p(y^n | x^n)`` for the given codeword indices."""
    codewords = np.asarray(codewords, dtype=np.int64)
    powers = dmc.in_size ** np.arange(n - 1, -1, -1)
    digits = (codewords[:, None] // powers[None, :]) % dmc.in_size
    out = np.ones((codewords.size, 1))
    for t in range(n):
        out = (out[:, :, None] * dmc.p[digits[:, t]][:, None, :]).reshape(codewords.size, -1)
    return out


def output_given_message(dmc: Dmc, code_n: int, encoder, *, cap=ENUMERATION_CAP, workers=None) -> np.ndarray:
    """Table ``p(out^n | m) = sum_x phi(x|m) prod_t dmc(out_t | x_t)``."""
    _check_cap(dmc.out_size, code_n, cap, "output")
    x_count = dmc.in_size**code_n
    for m, row in enumerate(encoder):
        for idx, _ in row:
            if not 0 <= idx < x_count:
                raise IndexOutOfRange(f"message {m}: codeword {idx} outside |X|^n = {x_count}")

    def one(row):
        idx = [i for i, _ in row]
        probs = [p for _, p in row]
        return compensated_rowsum(codeword_likelihoods(dmc, code_n, idx), probs)

    workers = default_workers() if workers is None else workers
    if workers > 1 and len(encoder) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, encoder))
    else:
        rows = [one(row) for row in encoder]
    return np.vstack(rows)


def map_decoder(ch: WiretapChannel, n, m_count, encoder, *, cap=ENUMERATION_CAP) -> np.ndarray:
    """psi(y^n) = argmax_m p(y^n | m); ties go to the lowest message index."""
    rows = _normalize_encoder(int(m_count), encoder, ch.x_size**int(n))
    table = output_given_message(ch.bob, int(n), rows, cap=cap)
    return np.argmax(table, axis=0).astype(np.int64)


@dataclass(frozen=True, eq=False)
class InducedJoint:
    """Exact output laws induced by a code over a channel with uniform messages."""

    channel: WiretapChannel
    code: WiretapCode
    p_y_given_m: np.ndarray
    p_y: np.ndarray
    p_z_given_m: np.ndarray
    p_z: np.ndarray

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def m_count(self) -> int:
        return self.code.m_count


def induced_joint(ch: WiretapChannel, code: WiretapCode, *, cap=ENUMERATION_CAP, workers=None) -> InducedJoint:
    _check_cap(ch.y_size, code.n, cap, "Y")
    _check_cap(ch.z_size, code.n, cap, "Z")
    if code.decoder is not None and code.decoder.size != ch.y_size**code.n:
        raise DecoderDomainIncomplete(f"decoder covers {code.decoder.size} of {ch.y_size**code.n} outputs")
    py_m = output_given_message(ch.bob, code.n, code.encoder, cap=cap, workers=workers)
    pz_m = output_given_message(ch.eve, code.n, code.encoder, cap=cap, workers=workers)
    prior = np.full(code.m_count, 1.0 / code.m_count)
    py = compensated_rowsum(py_m, prior)
    pz = compensated_rowsum(pz_m, prior)
    for a in (py_m, py, pz_m, pz):
        a.setflags(write=False)
    return InducedJoint(ch, code, py_m, py, pz_m, pz)


def _decoder_for(ij: InducedJoint) -> np.ndarray:
    if ij.code.decoder is not None:
        return ij.code.decoder
    return np.argmax(ij.p_y_given_m, axis=0)


def correct_probability(ij: InducedJoint, decoder=None) -> float:
    """(1/|M|) sum_m sum_{y: psi(y)=m} p(y|m). Uses the MAP decoder if the code has none."""
    dec = _decoder_for(ij) if decoder is None else np.asarray(decoder)
    hits = ij.p_y_given_m[dec, np.arange(ij.p_y_given_m.shape[1])]
    return fsum(hits) / ij.m_count


def error_probability(ij: InducedJoint, decoder=None) -> float:
    return 1.0 - correct_probability(ij, decoder)


def receiver_mutual_information(ij: InducedJoint, receiver: str = BOB) -> float:
    """Unnormalized I(M; Y^n) or I(M; Z^n) in nats."""
    receiver = receiver.lower()
    if receiver == BOB:
        table = ij.p_y_given_m
    elif receiver == EVE:
        table = ij.p_z_given_m
    else:
        raise ValueError(f"receiver must be 'bob' or 'eve', got {receiver!r}")
    return mutual_information(table, np.full(ij.m_count, 1.0 / ij.m_count))


def leakage_rate(ij: InducedJoint) -> float:
    """(1/n) I(M; Z^n)."""
    return receiver_mutual_information(ij, EVE) / ij.n


def message_count(n: int, rate: float) -> int:
    """ceil(e^{n rate}), ignoring round-off just above an integer."""
    target = math.exp(n * rate)
    return max(1, math.ceil(target * (1.0 - 1e-12)))


def random_binning_code(ch: WiretapChannel, n: int, rate: float, bin_rate: float = 0.0, seed: int = 0,
                        input_pmf=None, *, cap=ENUMERATION_CAP) -> WiretapCode:
    """Random binning code with a MAP decoder.

    ``ceil(e^{n rate})`` messages each own ``ceil(e^{n bin_rate})`` codewords
    drawn i.i.d. from ``input_pmf`` (uniform by default); the encoder picks
    uniformly within the bin, so repeated draws carry extra weight.
    """
    if not rate > 0:
        raise InvalidRate(f"rate must be positive, got {rate}")
    if bin_rate < 0:
        raise InvalidRate(f"bin_rate must be nonnegative, got {bin_rate}")
    _check_cap(ch.y_size, n, cap, "Y")
    _check_cap(ch.z_size, n, cap, "Z")
    pmf = np.full(ch.x_size, 1.0 / ch.x_size) if input_pmf is None else np.asarray(input_pmf, dtype=float)
    if pmf.shape != (ch.x_size,) or np.any(pmf < 0) or abs(pmf.sum() - 1.0) > ENCODER_TOL:
        raise ShapeMismatch("input_pmf must be a pmf over the input alphabet")
    m_count = message_count(n, rate)
    bin_size = message_count(n, bin_rate)
    if m_count * bin_size > cap:
        raise EnumerationTooLarge(f"{m_count} x {bin_size} codewords exceed the cap {cap}")
    rng = np.random.default_rng(np.uint64(seed % 2**64))
    symbols = rng.choice(ch.x_size, size=(m_count, bin_size, n), p=pmf / pmf.sum())
    powers = ch.x_size ** np.arange(n - 1, -1, -1)
    words = symbols @ powers
    encoder = [[(int(w), 1.0 / bin_size) for w in row] for row in words]
    code = build_code(n, m_count, encoder, x_size=ch.x_size)
    return code.with_decoder(map_decoder(ch, n, m_count, code.encoder, cap=cap))
