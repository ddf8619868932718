import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from secrexp._lp import linprog_dense
from secrexp.channel import (
    WiretapChannel,
    bsc,
    bsc_pair,
    degradation_residual,
    degradedness_check,
    index_to_sequence,
    load_channel,
    marginal,
    product_law,
    sequence_law,
    sequence_to_index,
)
from secrexp.errors import IndexOutOfRange, LengthMismatch, NegativeProbability, RowSumViolation, ShapeMismatch


def spec_for(w):
    w = np.asarray(w)
    return {"x_size": w.shape[0], "y_size": w.shape[1], "z_size": w.shape[2], "w": w.tolist()}


def test_load_bsc_pair():
    ch = load_channel(spec_for(bsc_pair(0.1, 0.2).w))
    assert (ch.x_size, ch.y_size, ch.z_size) == (2, 2, 2)
    np.testing.assert_allclose(ch.w.sum(axis=(1, 2)), 1.0, atol=1e-12)
    assert ch.w[0, 0, 0] == pytest.approx(0.9 * 0.8)


def test_load_from_file_and_json_string(tmp_path):
    spec = spec_for(bsc_pair(0.1, 0.2).w)
    path = tmp_path / "ch.json"
    path.write_text(json.dumps(spec))
    assert np.array_equal(load_channel(str(path)).w, load_channel(json.dumps(spec)).w)
    assert np.array_equal(load_channel(path).w, load_channel(spec).w)


def test_row_sum_violation():
    w = bsc_pair(0.1, 0.2).w.copy()
    w[1] *= 0.99
    with pytest.raises(RowSumViolation):
        load_channel(spec_for(w))


def test_negative_probability():
    w = bsc_pair(0.1, 0.2).w.copy()
    w[0] = [[-0.1, 0.82], [0.08, 0.2]]  # still sums to 1
    with pytest.raises(NegativeProbability):
        load_channel(spec_for(w))


def test_shape_mismatch():
    spec = spec_for(bsc_pair(0.1, 0.2).w)
    spec["z_size"] = 3
    with pytest.raises(ShapeMismatch):
        load_channel(spec)
    with pytest.raises(ShapeMismatch):
        load_channel({"x_size": 1, "y_size": 1, "w": [[[1.0]]]})


def test_rows_renormalized_after_tolerance():
    w = bsc_pair(0.1, 0.2).w * (1 + 5e-10)
    ch = WiretapChannel(w)
    assert ch.input_residual == pytest.approx(5e-10, rel=1e-3)
    assert all(abs(ch.w[x].sum() - 1.0) < 1e-15 for x in range(2))


def test_marginals_of_bsc_pair():
    ch = bsc_pair(0.1, 0.2)
    np.testing.assert_allclose(marginal(ch, "bob").p, bsc(0.1), atol=1e-15)
    np.testing.assert_allclose(marginal(ch, "eve").p, bsc(0.2), atol=1e-15)


def test_identity_channel_marginal():
    w = np.zeros((3, 3, 3))
    for x in range(3):
        w[x, x, x] = 1.0
    ch = WiretapChannel(w)
    assert np.array_equal(ch.bob.p, np.eye(3))
    assert np.array_equal(ch.eve.p, np.eye(3))


def test_product_law():
    ch = bsc_pair(0.1, 0.2)
    assert product_law(ch, [1], [0], [1]) == ch.w[1, 0, 1]
    assert sequence_law(ch.bob, (0, 0), (0, 0)) == pytest.approx(0.81, abs=1e-15)
    with pytest.raises(LengthMismatch):
        product_law(ch, [0, 0], [0, 0, 0], [0, 0])
    with pytest.raises(IndexOutOfRange):
        product_law(ch, [2], [0], [0])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 4), st.integers(1, 4))
def test_product_law_factorizes(seed, a, b):
    rng = np.random.default_rng(seed)
    ch = WiretapChannel(rng.dirichlet(np.ones(6), size=2).reshape(2, 3, 2))
    x, y, z = rng.integers(0, 2, a + b), rng.integers(0, 3, a + b), rng.integers(0, 2, a + b)
    whole = product_law(ch, x, y, z)
    parts = product_law(ch, x[:a], y[:a], z[:a]) * product_law(ch, x[a:], y[a:], z[a:])
    assert whole == pytest.approx(parts, rel=1e-14, abs=0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_marginal_rows_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    x, y, z = rng.integers(1, 5, size=3)
    ch = WiretapChannel(rng.dirichlet(np.ones(y * z), size=x).reshape(x, y, z))
    for r in ("bob", "eve"):
        assert np.all(np.abs(marginal(ch, r).p.sum(axis=1) - 1) <= 1e-12)


def test_sequence_indexing_first_symbol_most_significant():
    assert sequence_to_index((1, 0, 1), 2) == 5
    assert sequence_to_index((2, 1), 3) == 7
    assert index_to_sequence(7, 3, 2) == (2, 1)


def test_degraded_bsc_pair_witness():
    rep = degradedness_check(bsc_pair(0.1, 0.2))
    assert rep.degraded and rep.residual <= 1e-9
    np.testing.assert_allclose(rep.witness.p, bsc(0.125), atol=1e-9)


def test_reversed_bsc_pair_not_degraded():
    rep = degradedness_check(bsc_pair(0.2, 0.1))
    assert not rep.degraded
    assert rep.witness is None
    # best V is the identity; residual is |0.1 - 0.2|
    assert rep.residual == pytest.approx(0.1, abs=1e-9)


def test_equal_marginals_identity_witness():
    ch = bsc_pair(0.15, 0.15)
    rep = degradedness_check(ch)
    assert rep.degraded
    np.testing.assert_allclose(rep.witness.p, np.eye(2), atol=1e-9)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_constructed_degraded_channels(seed):
    rng = np.random.default_rng(seed)
    nx, ny, nz = rng.integers(1, 5, size=3)
    wy = rng.dirichlet(np.ones(ny), size=nx)
    v = rng.dirichlet(np.full(nz, 0.7), size=ny)
    ch = WiretapChannel.degraded(wy, v)
    rep = degradedness_check(ch)
    assert rep.degraded and rep.residual <= 1e-9
    assert degradation_residual(ch, rep.witness.p) <= 1e-9
    assert np.all(np.abs(rep.witness.p.sum(axis=1) - 1) <= 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_degradedness_residual_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    nx, ny, nz = rng.integers(1, 4, size=3)
    ch = WiretapChannel(rng.dirichlet(np.ones(ny * nz), size=nx).reshape(nx, ny, nz))
    rep = degradedness_check(ch)
    wy, wz = ch.bob.p, ch.eve.p
    nv = ny * nz
    a_ub, b_ub = [], []
    for x in range(nx):
        for z in range(nz):
            row = np.zeros(nv + 1)
            row[z:nv:nz] = wy[x]
            a_ub.append(np.r_[row[:nv], -1.0])
            b_ub.append(wz[x, z])
            a_ub.append(np.r_[-row[:nv], -1.0])
            b_ub.append(-wz[x, z])
    a_eq = np.zeros((ny, nv + 1))
    for y in range(ny):
        a_eq[y, y * nz:(y + 1) * nz] = 1
    ref = linprog(np.r_[np.zeros(nv), 1.0], A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=np.ones(ny), method="highs")
    assert rep.residual == pytest.approx(ref.fun, abs=1e-7)


def test_linprog_dense_small_problems():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    res = linprog_dense([-1, -1], [[1, 2], [3, 1]], [4, 6])
    assert res.status == "optimal"
    np.testing.assert_allclose(res.x, [1.6, 1.2], atol=1e-12)
    assert linprog_dense([1, 1], A_eq=[[1, 1]], b_eq=[-1]).status == "infeasible"
    assert linprog_dense([-1, 0], [[0, 1]], [1]).status == "unbounded"
