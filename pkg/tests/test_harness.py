import math

import numpy as np
import pytest

from instances import random_instance
from secrexp._numeric import binary_entropy
from secrexp.channel import bsc_pair
from secrexp.code import build_code
from secrexp.harness import (
    SWEEP_COLUMNS,
    ConverseExperimentConfig,
    converse_sweep,
    decay_rows,
    exponent_table,
    median_by_n,
    plan_sweep,
    sweep_csv,
)

CS = binary_entropy(0.2) - binary_entropy(0.1)
C_BOB = math.log(2) - binary_entropy(0.1)


@pytest.fixture(scope="module")
def wiretap_rows():
    cfg = ConverseExperimentConfig(channel=bsc_pair(0.1, 0.2), delta=0.05, n_list=(2, 4), seeds=tuple(range(6)),
                                   capacity=CS)
    return cfg, converse_sweep(cfg)


def test_rows_obey_bounds(wiretap_rows):
    _, rows = wiretap_rows
    assert len(rows) == 12
    for r in rows:
        assert r.p_correct <= min(r.lemma3_bound, r.verdu_han_bound) + 1e-12
        assert r.exponent_estimate == pytest.approx(math.log(r.p_correct) / r.n)


def test_rows_echo_configuration(wiretap_rows):
    cfg, rows = wiretap_rows
    for r in rows:
        assert r.eta == 0.025 == cfg.delta / 2
        assert r.rate == CS + 4 * 0.05
        assert r.code_rate >= r.rate - 1e-12
        assert r.secrecy_ok == (r.leakage < cfg.delta)
    assert [(r.n, r.seed) for r in rows] == sorted((r.n, r.seed) for r in rows)


def test_chain_bound_ordering(wiretap_rows):
    _, rows = wiretap_rows
    for r in rows:
        if r.premise_ok:
            assert r.chain_bound >= r.lemma3_bound * (1 - 1e-12)
        # chain_bound is exp{n theta (eta - delta)} + e^{-n eta} in wiretap mode
        assert r.chain_bound == pytest.approx(
            math.exp(r.n * r.theta_star * (r.eta - 0.05)) + math.exp(-r.n * r.eta), rel=1e-9)


def test_decay_rows_split(wiretap_rows):
    _, rows = wiretap_rows
    used, excluded = decay_rows(rows, "wiretap")
    assert all(r.secrecy_ok for r in used) and not any(r.secrecy_ok for r in excluded)
    assert len(used) + len(excluded) == len(rows)
    assert decay_rows(rows, "point_to_point") == (rows, [])


def test_csv_schema_and_determinism(wiretap_rows):
    cfg, rows = wiretap_rows
    text = sweep_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "n,seed,rate,leakage,secrecy_ok,p_correct,theta_star,eta,lemma3_bound,verdu_han_bound,exponent_estimate"
    assert lines[0].split(",") == list(SWEEP_COLUMNS)
    assert len(lines) == 13
    assert lines[1].split(",")[4] in ("true", "false")
    assert sweep_csv(converse_sweep(cfg)) == text


def test_point_to_point_negative_exponents():
    cfg = ConverseExperimentConfig(channel=bsc_pair(0.1, 0.2), delta=0.05, n_list=(2, 4, 6, 8),
                                   seeds=tuple(range(5)), mode="point_to_point")
    plan = plan_sweep(cfg)
    assert plan.capacity == pytest.approx(C_BOB, abs=1e-12)
    assert plan.rate == pytest.approx(C_BOB + 0.2, abs=1e-12)
    assert plan.bin_rate == 0.0
    rows = converse_sweep(cfg, plan)
    assert all(r.exponent_estimate < 0 for r in rows)
    assert all(r.p_correct <= r.lemma3_bound for r in rows)
    assert all(r.premise_ok for r in rows)


def test_default_bin_rate():
    cfg = ConverseExperimentConfig(channel=bsc_pair(0.1, 0.2), capacity=CS)
    plan = plan_sweep(cfg)
    # I(X;Z) at uniform input equals ln 2 - h(0.2) for a BSC
    assert plan.bin_rate == pytest.approx(math.log(2) - binary_entropy(0.2) + 0.02, abs=1e-12)
    assert plan.target == pytest.approx(CS + 0.05)


def test_config_validation(tmp_path, data_dir):
    with pytest.raises(ValueError):
        ConverseExperimentConfig(channel=bsc_pair(0.1, 0.2), delta=0.0)
    with pytest.raises(ValueError):
        ConverseExperimentConfig(channel=bsc_pair(0.1, 0.2), mode="broadcast")
    cfg = ConverseExperimentConfig.from_file(f"{data_dir}/sweep_point_to_point.json")
    assert cfg.mode == "point_to_point" and cfg.n_list == (2, 4, 6, 8, 10)


def test_exponent_table_examples():
    ch = bsc_pair(0.1, 0.2)
    blind = build_code(2, 2, [[(0, 0.5), (3, 0.5)]] * 2)
    prof = exponent_table(ch, blind)
    np.testing.assert_allclose(prof.xi, 0.0, atol=1e-13)
    ident = build_code(1, 2, [[(0, 1.0)], [(1, 1.0)]])
    prof = exponent_table(ch, ident)
    assert prof.xi1[0] == pytest.approx(0.368064, abs=1e-4)
    assert prof.zeta[0] < 0  # target defaults to I(M;Y)/n
    assert prof.to_csv().splitlines()[0] == "theta,xi,xi1,xi2,zeta,lemma3_bound"


def test_exponent_table_no_convexity_flags():
    rng = np.random.default_rng(5)
    for _ in range(40):
        ch, code, _ = random_instance(rng)
        assert not exponent_table(ch, code).convexity_flags.any()


def test_median_by_n(wiretap_rows):
    _, rows = wiretap_rows
    med = median_by_n(rows, "p_correct")
    assert sorted(med) == [2, 4]
