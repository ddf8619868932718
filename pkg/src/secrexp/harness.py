"""Converse experiments: random-binning codes above capacity and their bound chain.

Each (n, seed) job draws a random binning code at rate ``R = C + 4 delta``
(wiretap mode, C the secrecy capacity) or ``R = C + Delta`` (point-to-point
mode, C Bob's channel capacity), evaluates it exactly, and records the
correct-decoding probability next to the Verdu-Han and Chernoff-tilted
bounds with ``eta = delta / 2`` and ``Delta = 4 delta``.

The decay shown here is for random-binning families only; it illustrates the
converse and proves nothing about arbitrary codes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import median

import numpy as np

from .capacity import SolverConfig, blahut_arimoto, input_mutual_information, secrecy_capacity
from .channel import WiretapChannel, load_channel
from .code import (
    correct_probability,
    induced_joint,
    leakage_rate,
    random_binning_code,
    receiver_mutual_information,
)
from .errors import NoFeasibleTheta
from .spectrum import (
    BoundParams,
    ExponentProfile,
    default_theta_grid,
    lemma3_bound,
    lemma3_value,
    select_theta,
    verdu_han_bound,
    with_bounds,
    xi_profile,
)

WIRETAP = "wiretap"
POINT_TO_POINT = "point_to_point"
SWEEP_COLUMNS = (
    "n", "seed", "rate", "leakage", "secrecy_ok", "p_correct", "theta_star",
    "eta", "lemma3_bound", "verdu_han_bound", "exponent_estimate",
)


@dataclass
class ConverseExperimentConfig:
    """Sweep settings.

    ``target_offset`` sets the per-code target ``C + target_offset * delta``
    used to pick theta in wiretap mode (1 by default, which makes
    ``target + Delta/2 = C + 3 delta``). ``capacity`` overrides the solver.
    """

    channel: WiretapChannel
    delta: float = 0.05
    n_list: tuple = (2, 4, 6, 8)
    seeds: tuple = tuple(range(20))
    bin_rate: float | None = None
    epsilon_note: float = 0.0
    mode: str = WIRETAP
    input_pmf: tuple | None = None
    theta_grid: np.ndarray | None = None
    capacity: float | None = None
    target_offset: float = 1.0
    solver: SolverConfig = field(default_factory=SolverConfig)
    workers: int = 1

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if self.mode not in (WIRETAP, POINT_TO_POINT):
            raise ValueError(f"mode must be '{WIRETAP}' or '{POINT_TO_POINT}', got {self.mode!r}")
        if not 0 <= self.epsilon_note < 1:
            raise ValueError("epsilon_note must lie in [0, 1)")
        self.n_list = tuple(int(n) for n in self.n_list)
        self.seeds = tuple(int(s) for s in self.seeds)
        if not self.n_list or min(self.n_list) < 1:
            raise ValueError("n_list must hold positive blocklengths")

    @property
    def eta(self) -> float:
        return self.delta / 2

    @property
    def Delta(self) -> float:
        return 4 * self.delta

    @classmethod
    def from_dict(cls, d: dict, base_dir: str = ".") -> "ConverseExperimentConfig":
        d = dict(d)
        ch = d.pop("channel")
        if isinstance(ch, str):
            ch = load_channel(ch if os.path.isabs(ch) else os.path.join(base_dir, ch))
        elif isinstance(ch, dict):
            ch = load_channel(ch)
        solver = SolverConfig(**d.pop("solver", {}))
        if "theta_grid" in d and d["theta_grid"] is not None:
            d["theta_grid"] = np.asarray(d["theta_grid"], dtype=float)
        return cls(channel=ch, solver=solver, **d)

    @classmethod
    def from_file(cls, path) -> "ConverseExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh), os.path.dirname(os.path.abspath(path)))


@dataclass(frozen=True)
class SweepRow:
    n: int
    seed: int
    rate: float
    leakage: float
    secrecy_ok: bool
    p_correct: float
    theta_star: float
    eta: float
    lemma3_bound: float
    verdu_han_bound: float
    exponent_estimate: float
    # diagnostics outside the CSV schema
    code_rate: float = math.nan
    info_rate: float = math.nan
    theta_feasible: bool = True
    premise_ok: bool = True
    chain_bound: float = math.nan

    def csv_fields(self):
        out = []
        for name in SWEEP_COLUMNS:
            v = getattr(self, name)
            if isinstance(v, bool):
                out.append("true" if v else "false")
            elif isinstance(v, int):
                out.append(str(v))
            else:
                out.append(format(float(v), ".12g"))
        return out


@dataclass(frozen=True)
class SweepPlan:
    """Quantities shared by every row of a sweep."""

    capacity: float
    rate: float
    target: float
    bin_rate: float
    Delta: float
    eta: float
    theta_grid: np.ndarray


def plan_sweep(cfg: ConverseExperimentConfig) -> SweepPlan:
    ch = cfg.channel
    uniform = np.full(ch.x_size, 1.0 / ch.x_size)
    if cfg.mode == WIRETAP:
        cap = cfg.capacity if cfg.capacity is not None else secrecy_capacity(ch, cfg.solver).value
        rate = cap + 4 * cfg.delta
        target = cap + cfg.target_offset * cfg.delta
        default_bin = input_mutual_information(ch.eve, uniform) + 0.02
    else:
        cap = cfg.capacity if cfg.capacity is not None else blahut_arimoto(ch.bob)[0]
        rate = cap + cfg.Delta
        target = cap
        default_bin = 0.0
    bin_rate = default_bin if cfg.bin_rate is None else float(cfg.bin_rate)
    grid = default_theta_grid() if cfg.theta_grid is None else np.asarray(cfg.theta_grid, dtype=float)
    return SweepPlan(cap, rate, target, bin_rate, cfg.Delta, cfg.eta, grid)


def evaluate_row(cfg: ConverseExperimentConfig, plan: SweepPlan, n: int, seed: int) -> SweepRow:
    ch = cfg.channel
    code = random_binning_code(ch, n, plan.rate, plan.bin_rate, seed, cfg.input_pmf)
    ij = induced_joint(ch, code, workers=1)
    leak = leakage_rate(ij)
    pc = correct_probability(ij)
    profile = xi_profile(ij, plan.theta_grid)
    try:
        theta = select_theta(profile, plan.target, plan.Delta)
        feasible = True
    except NoFeasibleTheta:
        # fall back to the tightest grid bound; the chain premise is then unverified
        vals = [lemma3_value(x, n, plan.rate, plan.eta, t) for t, x in zip(profile.theta_grid, profile.xi)]
        theta = float(profile.theta_grid[int(np.argmin(vals))])
        feasible = False
    l3 = lemma3_bound(ij, BoundParams(R=plan.rate, eta=plan.eta, theta=theta, n=n))
    vh = verdu_han_bound(ij, plan.rate, plan.eta)
    slope = plan.target + plan.Delta / 2
    premise = profile.xi_at(theta) / n <= theta * slope + 1e-12
    chain = math.exp(n * theta * (plan.eta - (plan.rate - slope))) + math.exp(-n * plan.eta)
    return SweepRow(
        n=n, seed=seed, rate=plan.rate, leakage=leak, secrecy_ok=bool(leak < cfg.delta),
        p_correct=pc, theta_star=theta, eta=plan.eta, lemma3_bound=l3, verdu_han_bound=vh,
        exponent_estimate=math.log(pc) / n, code_rate=code.rate,
        info_rate=receiver_mutual_information(ij, "bob") / n,
        theta_feasible=feasible, premise_ok=bool(feasible and premise), chain_bound=chain,
    )


def converse_sweep(cfg: ConverseExperimentConfig, plan: SweepPlan | None = None) -> list:
    """Evaluate every (n, seed) pair; rows come back sorted by (n, seed)."""
    plan = plan or plan_sweep(cfg)
    jobs = sorted((n, s) for n in cfg.n_list for s in cfg.seeds)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(lambda job: evaluate_row(cfg, plan, *job), jobs))
    return [evaluate_row(cfg, plan, n, s) for n, s in jobs]


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow(row.csv_fields())
    return buf.getvalue()


def decay_rows(rows, mode: str = WIRETAP):
    """Split rows into (used, excluded); wiretap mode drops rows with leakage >= delta."""
    if mode != WIRETAP:
        return list(rows), []
    used = [r for r in rows if r.secrecy_ok]
    return used, [r for r in rows if not r.secrecy_ok]


def median_by_n(rows, attr: str) -> dict:
    by_n = {}
    for r in rows:
        by_n.setdefault(r.n, []).append(getattr(r, attr))
    return {n: median(v) for n, v in sorted(by_n.items())}


def exponent_table(channel: WiretapChannel, code, theta_grid=None, Delta: float = 0.2, target: float | None = None,
                   rate: float | None = None, eta: float | None = None) -> ExponentProfile:
    """Exponent profile with zeta, bound and convexity-flag columns.

    Defaults: ``target = I(M;Y^n)/n``, ``rate`` = the code's rate and
    ``eta = Delta / 8`` (delta / 2 under Delta = 4 delta).
    """
    ij = induced_joint(channel, code)
    profile = xi_profile(ij, theta_grid)
    target = profile.xi1_at_zero / profile.n if target is None else target
    rate = code.rate if rate is None else rate
    eta = Delta / 8 if eta is None else eta
    return with_bounds(profile, target, Delta, rate, eta)
