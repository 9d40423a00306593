"""Seeded, parallelizable repetition experiments.

Two kinds of experiment live here: MSE sweeps over a grid of first-stage
slopes or effect sizes (one aggregate row per grid point and penalty
level), and collection of the raw sampling distribution of the scaled
estimator for checking the closed-form limits in :mod:`.asymptotics`.

Every repetition gets its own seed derived deterministically from
``(master_seed, grid index, rep index)``, and the reduction over reps is
performed in rep order, so results are bit-identical for a given config
regardless of worker count or scheduling.

The ``lambda_values`` of a sweep are denominator shifts at covariance
scale: each estimate is Cov[Y,Z] / (Cov[D,Z] + lambda).  At the sweep's
sample size this is the linear-rate schedule ``lambda_n = lambda * n`` of
:class:`~ridgeiv.estimators.PenaltySchedule`, the regime aggressive enough
to tame a weak first stage.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .dgp import DgpParams, generate_dataset
from .estimators import (
    DegenerateDenominatorError,
    PenaltySchedule,
    demeaned_cov,
    fit_ridge_iv,
    shifted_ratio,
)

__all__ = [
    "GridVariable",
    "SweepConfig",
    "SweepCell",
    "SweepResult",
    "derive_seed",
    "run_sweep",
    "collect_sampling_distribution",
]


class GridVariable(enum.Enum):
    """Which structural parameter the sweep varies."""

    PI1 = "pi1"
    BETA1 = "beta1"


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    """Full specification of one MSE sweep."""

    base_params: DgpParams
    grid_variable: GridVariable
    grid: tuple[float, ...]
    lambda_values: tuple[float, ...]
    n: int
    reps: int
    master_seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(
            self, "lambda_values", tuple(float(v) for v in self.lambda_values)
        )
        if not self.grid:
            raise ValueError("grid must be non-empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")
        if not self.lambda_values:
            raise ValueError("lambda_values must be non-empty")
        if any(lam < 0 for lam in self.lambda_values):
            raise ValueError("lambda values must be nonnegative")
        if self.n < 3:
            raise ValueError(f"n must be at least 3, got {self.n}")
        if self.reps < 1:
            raise ValueError(f"reps must be at least 1, got {self.reps}")
        if (
            self.grid_variable is GridVariable.PI1
            and self.base_params.stock_c is not None
        ):
            raise ValueError(
                "cannot sweep pi1 while stock_c overrides the first-stage slope"
            )

    def params_at(self, grid_value: float) -> DgpParams:
        field = "pi1" if self.grid_variable is GridVariable.PI1 else "beta1"
        return dataclasses.replace(self.base_params, **{field: grid_value})


@dataclasses.dataclass(frozen=True)
class SweepCell:
    """Monte Carlo aggregates for one (grid value, lambda) pair.

    ``mse``, ``bias`` and ``variance`` describe beta1_hat - beta1 over the
    non-degenerate reps (1/reps convention, so mse = bias^2 + variance);
    the quantiles describe beta1_hat itself.  Reps whose penalized
    denominator was exactly zero are counted in ``n_degenerate`` and
    excluded from the moments.
    """

    grid_value: float
    lam: float
    mse: float
    bias: float
    variance: float
    q05: float
    q25: float
    q50: float
    q75: float
    q95: float
    n_degenerate: int


@dataclasses.dataclass(frozen=True)
class SweepResult:
    grid_variable: GridVariable
    n: int
    reps: int
    cells: tuple[SweepCell, ...]
    estimates_path: Path | None = None

    def cells_for_lambda(self, lam: float) -> tuple[SweepCell, ...]:
        return tuple(c for c in self.cells if c.lam == lam)

    def mse_curve(self, lam: float) -> tuple[np.ndarray, np.ndarray]:
        cells = self.cells_for_lambda(lam)
        return (
            np.array([c.grid_value for c in cells]),
            np.array([c.mse for c in cells]),
        )


def derive_seed(master_seed: int, *path: int) -> int:
    """Derive an independent child seed from a master seed and an index path.

    Distinct paths give statistically independent streams, and the mapping
    is stable across platforms and processes, so work can be farmed out in
    any order without changing a single draw.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _resolve_workers(workers: int | None, n_tasks: int) -> int:
    env = os.environ.get("RIDGEIV_THREADS")
    cap = int(env) if env else None
    if cap is not None and cap < 1:
        raise ValueError(f"RIDGEIV_THREADS must be positive, got {cap}")
    if workers is None:
        workers = cap if cap is not None else 1
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    if cap is not None:
        workers = min(workers, cap)
    return min(workers, n_tasks)


def _sweep_grid_point(
    config: SweepConfig, grid_index: int
) -> tuple[np.ndarray, np.ndarray]:
    """All reps for one grid point: estimates and degeneracy markers.

    Returns arrays of shape (len(lambda_values), reps); datasets are shared
    across lambda values within a rep so penalties are compared on the
    same draws.
    """
    params = config.params_at(config.grid[grid_index])
    n_lam = len(config.lambda_values)
    estimates = np.zeros((n_lam, config.reps))
    degenerate = np.zeros((n_lam, config.reps), dtype=bool)
    for rep in range(config.reps):
        seed = derive_seed(config.master_seed, grid_index, rep)
        data = generate_dataset(params, config.n, seed)
        z = data.z[:, 0]
        numerator = demeaned_cov(data.y, z)
        cov_dz = demeaned_cov(data.d, z)
        for li, lam in enumerate(config.lambda_values):
            try:
                estimates[li, rep] = shifted_ratio(numerator, cov_dz, lam)
            except DegenerateDenominatorError:
                degenerate[li, rep] = True
    return estimates, degenerate


def _aggregate(
    estimates: np.ndarray,
    degenerate: np.ndarray,
    true_beta1: float,
    grid_value: float,
    lam: float,
) -> SweepCell:
    values = estimates[~degenerate]
    n_degenerate = int(degenerate.sum())
    if values.size == 0:
        nan = math.nan
        return SweepCell(
            grid_value, lam, nan, nan, nan, nan, nan, nan, nan, nan, n_degenerate
        )
    errors = values - true_beta1
    bias = float(errors.mean())
    variance = float(np.mean((errors - bias) ** 2))
    mse = float(np.mean(errors**2))
    q05, q25, q50, q75, q95 = np.quantile(values, [0.05, 0.25, 0.5, 0.75, 0.95])
    return SweepCell(
        grid_value=grid_value,
        lam=lam,
        mse=mse,
        bias=bias,
        variance=variance,
        q05=float(q05),
        q25=float(q25),
        q50=float(q50),
        q75=float(q75),
        q95=float(q95),
        n_degenerate=n_degenerate,
    )


def run_sweep(
    config: SweepConfig,
    workers: int | None = None,
    raw_path: Path | str | None = None,
) -> SweepResult:
    """Run the full sweep and aggregate MSE/bias/variance per cell.

    Parameters
    ----------
    config : SweepConfig
        Grid, penalties, sample size, repetition count and master seed.
    workers : int, optional
        Worker threads over grid points.  Defaults to the
        ``RIDGEIV_THREADS`` environment variable (which also caps an
        explicit value), else 1.  The output is bit-identical for any
        worker count.
    raw_path : path, optional
        When given, per-rep estimates are persisted there as CSV with
        columns (grid_value, lambda, rep, beta1_hat, degenerate); the
        estimate field of degenerate reps is written as nan.
    """
    n_grid = len(config.grid)
    n_workers = _resolve_workers(workers, n_grid)
    per_point: list[tuple[np.ndarray, np.ndarray] | None] = [None] * n_grid
    if n_workers == 1:
        for gi in range(n_grid):
            per_point[gi] = _sweep_grid_point(config, gi)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            futures = {
                pool.submit(_sweep_grid_point, config, gi): gi for gi in range(n_grid)
            }
            for future, gi in futures.items():
                per_point[gi] = future.result()

    cells = []
    for lam_index, lam in enumerate(config.lambda_values):
        for gi, grid_value in enumerate(config.grid):
            estimates, degenerate = per_point[gi]
            true_beta1 = config.params_at(grid_value).beta1
            cells.append(
                _aggregate(
                    estimates[lam_index],
                    degenerate[lam_index],
                    true_beta1,
                    grid_value,
                    lam,
                )
            )

    estimates_path: Path | None = None
    if raw_path is not None:
        estimates_path = Path(raw_path)
        _write_raw_estimates(config, per_point, estimates_path)

    return SweepResult(
        grid_variable=config.grid_variable,
        n=config.n,
        reps=config.reps,
        cells=tuple(cells),
        estimates_path=estimates_path,
    )


def _write_raw_estimates(
    config: SweepConfig,
    per_point: list[tuple[np.ndarray, np.ndarray]],
    path: Path,
) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["grid_value", "lambda", "rep", "beta1_hat", "degenerate"])
        for lam_index, lam in enumerate(config.lambda_values):
            for gi, grid_value in enumerate(config.grid):
                estimates, degenerate = per_point[gi]
                for rep in range(config.reps):
                    bad = bool(degenerate[lam_index, rep])
                    value = math.nan if bad else float(estimates[lam_index, rep])
                    writer.writerow(
                        [repr(grid_value), repr(lam), rep, repr(value), int(bad)]
                    )


def collect_sampling_distribution(
    params: DgpParams,
    schedule: PenaltySchedule,
    n: int,
    reps: int,
    master_seed: int,
) -> np.ndarray:
    """Realizations of the scaled estimator across seeded repetitions.

    Returns sqrt(n) * (beta1_hat - beta1) when the first stage is a fixed
    slope, and sqrt(n) * beta1_hat when ``params.stock_c`` is set (the
    drifting regime, where the estimator is centered near zero, not near
    beta1).  Reps with an exactly-zero denominator are dropped.
    """
    if reps < 1:
        raise ValueError(f"reps must be at least 1, got {reps}")
    center = 0.0 if params.stock_c is not None else params.beta1
    root_n = math.sqrt(n)
    out = np.empty(reps)
    keep = np.ones(reps, dtype=bool)
    for rep in range(reps):
        data = generate_dataset(params, n, derive_seed(master_seed, rep))
        try:
            estimate = fit_ridge_iv(data, schedule)
        except DegenerateDenominatorError:
            keep[rep] = False
            continue
        out[rep] = root_n * (estimate.beta1_hat - center)
    return out[keep]
