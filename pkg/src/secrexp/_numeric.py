"""Small numeric helpers shared across modules (all logs natural)."""

import math

import numpy as np
from scipy.special import rel_entr

ROW_TOL = 1e-9


def fsum(values) -> float:
    """Compensated (exactly rounded) sum of an iterable or array."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def compensated_rowsum(rows, weights) -> np.ndarray:
    """Return ``sum_k weights[k] * rows[k]`` with Neumaier compensation.

    Vectorized over the trailing axis; the accumulation order is fixed, so the
    result is deterministic.
    """
    rows = np.asarray(rows, dtype=float)
    total = np.zeros(rows.shape[1:])
    comp = np.zeros_like(total)
    for w, row in zip(weights, rows):
        term = w * row
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        total = t
    return total + comp


def mutual_information(cond, prior) -> float:
    """I(A;B) in nats from rows ``cond[a] = p(b|a)`` and prior ``p(a)``.

    Uses the 0 log 0 = 0 convention.
    """
    cond = np.asarray(cond, dtype=float)
    prior = np.asarray(prior, dtype=float)
    marg = compensated_rowsum(cond, prior)
    terms = prior[:, None] * rel_entr(cond, marg[None, :])
    # rel_entr gives +inf for p>0, q=0 which cannot happen for a true marginal
    return max(fsum(terms), 0.0)


def entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    return fsum(-rel_entr(p, 1.0))


def binary_entropy(p: float) -> float:
    return entropy([p, 1.0 - p])


def check_stochastic_rows(table, tol, row_error, negative_error, what="row"):
    """Validate nonnegativity and unit row sums; return renormalized copy and max residual."""
    table = np.array(table, dtype=float)
    if np.any(~np.isfinite(table)):
        raise negative_error(f"{what}: non-finite probability")
    if np.any(table < 0):
        idx = tuple(int(i) for i in np.argwhere(table < 0)[0])
        raise negative_error(f"{what}: negative probability {table[idx]!r} at index {idx}")
    flat = table.reshape(table.shape[0], -1)
    sums = np.array([fsum(r) for r in flat])
    resid = np.abs(sums - 1.0)
    if np.any(resid > tol):
        k = int(np.argmax(resid))
        raise row_error(f"{what} {k} sums to {sums[k]!r} (tolerance {tol})")
    flat = flat / sums[:, None]
    return flat.reshape(table.shape), float(resid.max(initial=0.0))
