"""Batch experiments: correlation sums for the named states, GME sampling, Bell trials."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bell import LocalityResult, born_table, lhv_feasible, random_bases, strategy_values
from .correlations import PER_PLACEMENT, corr_tensor, sigma
from .gme import GME_THRESHOLD, gme_witness
from .notmap import nc_state
from .qla import DensityMatrix
from .states import NAMED_STATES, density, haar_random_pure, named_state, rng

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SigmaRow:
    state: str
    kind: str  # "original" or "nc"
    k: int
    value: float


def sigma_table(names=NAMED_STATES, convention: str = PER_PLACEMENT) -> list[SigmaRow]:
    rows = []
    for name in names:
        rho = density(named_state(name))
        for kind, r in (("original", rho), ("nc", nc_state(rho))):
            t = corr_tensor(r)
            rows += [SigmaRow(name, kind, k, sigma(t, k, convention)) for k in range(1, r.n + 1)]
    return rows


@dataclass(frozen=True)
class SampleConfig:
    count: int = 200
    seed: int = 7
    d: int = 3
    n: int = 3
    tol: float = 1e-8
    threshold: float = GME_THRESHOLD
    workers: int = 1


@dataclass
class SampleReport:
    config: SampleConfig
    values: list[float] = field(default_factory=list)

    @property
    def hits(self) -> int:
        return sum(v > self.config.threshold for v in self.values)

    @property
    def fraction(self) -> float:
        return self.hits / len(self.values) if self.values else float("nan")


def sample_inputs(cfg: SampleConfig) -> list[DensityMatrix]:
    """The Haar-random inputs, drawn sequentially from one seeded stream."""
    gen = rng(cfg.seed)
    return [density(haar_random_pure(cfg.d, cfg.n, gen)) for _ in range(cfg.count)]


def _witness_value(args: tuple[DensityMatrix, float]) -> float:
    rho, tol = args
    return gme_witness(nc_state(rho), tol=tol).value


def _pool_map(fn, items, workers: int):
    if workers <= 1:
        yield from map(fn, items)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, items)


def run_sample(cfg: SampleConfig, progress=None) -> SampleReport:
    """Evaluate the witness on the no-correlation partner of every sampled input."""
    report = SampleReport(cfg)
    jobs = [(rho, cfg.tol) for rho in sample_inputs(cfg)]
    for i, value in enumerate(_pool_map(_witness_value, jobs, cfg.workers)):
        report.values.append(value)
        log.info("sample %d: W = %.6g", i, value)
        if progress is not None:
            progress(i, value)
    return report


@dataclass(frozen=True)
class BellConfig:
    settings: int = 3
    trials: int = 20
    seed: int = 0
    workers: int = 1


@dataclass(frozen=True)
class BellTrial:
    trial: int
    seed: int
    result: LocalityResult


def _bell_trial(args: tuple[DensityMatrix, int, int, int]) -> BellTrial:
    rho, settings, trial, seed = args
    m = random_bases(rho.local_dim, rho.n, settings, seed)
    return BellTrial(trial, seed, lhv_feasible(born_table(rho, m)))


def run_bell(rho: DensityMatrix, cfg: BellConfig) -> list[BellTrial]:
    """One LP per trial; trial ``t`` draws its settings from seed ``cfg.seed + t``."""
    jobs = [(rho, cfg.settings, t, cfg.seed + t) for t in range(cfg.trials)]
    return list(_pool_map(_bell_trial, jobs, cfg.workers))


def strategy_gap(trial: BellTrial) -> float | None:
    """Quantum value minus the best deterministic strategy, for non-local trials."""
    cert = trial.result.certificate
    if cert is None:
        return None
    m = cert.coefficients.shape
    n = len(m) // 2
    vals = strategy_values(cert, m[-1], m[0], n)
    return float(cert.quantum_value - np.max(vals))
