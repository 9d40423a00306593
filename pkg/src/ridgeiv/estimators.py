"""Two-stage least squares and ridge-penalized IV estimators.

The scalar just-identified estimator is a ratio of demeaned covariances,

    beta_hat = Cov[Y, Z] / (Cov[D, Z] + lambda_n / n),

which reduces to 2SLS at lambda_n = 0.  Covariances use the 1/n convention
throughout so that the penalty composes with the sample size exactly as
written above.  The matrix forms (`fit_ridge_iv_matrix`,
`fit_ridge_iv_overidentified`) and the penalized-moment operations
(`gmm_objective`, `gmm_minimize`, `lagrange_correspondence`) work on raw
uncentered arrays; the two conventions are never mixed silently.

An exactly-zero denominator raises :class:`DegenerateDenominatorError`.
Near-zero denominators pass through on purpose: the instability of the
unpenalized estimator is a measured quantity here, not a failure mode.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dgp import Dataset

__all__ = [
    "DegenerateDenominatorError",
    "DegenerateInstrumentError",
    "SingularSystemError",
    "PenaltyRate",
    "PenaltySchedule",
    "Estimate",
    "demeaned_cov",
    "shifted_ratio",
    "first_stage",
    "reduced_form",
    "fit_2sls",
    "fit_ridge_iv",
    "solve_shifted",
    "fit_ridge_iv_matrix",
    "fit_ridge_iv_overidentified",
    "gmm_objective",
    "gmm_minimize",
    "lagrange_correspondence",
]


class DegenerateDenominatorError(ArithmeticError):
    """The (possibly penalized) IV denominator is exactly zero."""


class DegenerateInstrumentError(ValueError):
    """The instrument has zero sample variance."""


class SingularSystemError(ArithmeticError):
    """A shifted cross-moment system has no unique solution."""


class PenaltyRate(enum.Enum):
    """Growth rate of the penalty lambda_n in the sample size."""

    CONSTANT = "constant"
    SQRT_N = "sqrt_n"
    LINEAR_N = "linear_n"


@dataclass(frozen=True)
class PenaltySchedule:
    """Rule mapping sample size n to the penalty lambda_n.

    lambda_n(n) is ``lambda0`` (CONSTANT), ``lambda0 * sqrt(n)`` (SQRT_N)
    or ``lambda0 * n`` (LINEAR_N).  ``lambda0 = 0`` reduces every form to
    unpenalized 2SLS.
    """

    rate: PenaltyRate
    lambda0: float

    def __post_init__(self) -> None:
        if self.lambda0 < 0:
            raise ValueError(f"lambda0 must be nonnegative, got {self.lambda0}")

    def lambda_n(self, n: int) -> float:
        if self.rate is PenaltyRate.CONSTANT:
            return self.lambda0
        if self.rate is PenaltyRate.SQRT_N:
            return self.lambda0 * math.sqrt(n)
        return self.lambda0 * n


@dataclass(frozen=True)
class Estimate:
    """A fitted slope plus the pieces of the penalized ratio and stage diagnostics."""

    beta1_hat: float
    numerator: float
    denominator: float
    lambda_n: float
    n: int
    pi1_hat: float
    sigma_eta_hat: float
    sigma_red_hat: float
    sigma_eps_hat: float

    @property
    def std_error(self) -> float:
        """Plug-in standard error from the limiting variance sigma_eps^2 / pi1^2."""
        if self.pi1_hat == 0.0:
            return math.inf
        return self.sigma_eps_hat / (abs(self.pi1_hat) * math.sqrt(self.n))


def demeaned_cov(x: np.ndarray, w: np.ndarray) -> float:
    """Sample covariance (1/n) * sum (x_i - xbar)(w_i - wbar)."""
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if x.ndim != 1 or w.ndim != 1:
        raise ValueError("inputs must be one-dimensional")
    if x.shape[0] != w.shape[0]:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {w.shape[0]}")
    if x.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    return float(np.mean((x - x.mean()) * (w - w.mean())))


def shifted_ratio(numerator: float, cov_dz: float, shift: float) -> float:
    """The scalar penalized ratio numerator / (cov_dz + shift).

    Shared core of the scalar estimators and the sweep harness; raises
    :class:`DegenerateDenominatorError` iff the shifted denominator is
    exactly zero.
    """
    denominator = cov_dz + shift
    if denominator == 0.0:
        raise DegenerateDenominatorError(
            f"shifted denominator is exactly zero (cov = {cov_dz!r}, shift = {shift!r})"
        )
    return numerator / denominator


def _instrument_column(data: Dataset) -> np.ndarray:
    if data.k != 1:
        raise ValueError(
            f"operation requires a single instrument, got k = {data.k}"
        )
    return data.z[:, 0]


def _simple_ols(x: np.ndarray, t: np.ndarray) -> tuple[float, float, float]:
    """OLS of t on (1, x); returns (intercept, slope, residual sd, 1/n convention)."""
    var_x = demeaned_cov(x, x)
    if var_x == 0.0:
        raise DegenerateInstrumentError("regressor has zero sample variance")
    slope = demeaned_cov(x, t) / var_x
    intercept = float(t.mean() - slope * x.mean())
    resid = t - intercept - slope * x
    return intercept, slope, float(np.sqrt(np.mean(resid**2)))


def first_stage(data: Dataset) -> tuple[float, float, float]:
    """OLS of D on (1, Z): returns (pi0_hat, pi1_hat, sigma_eta_hat)."""
    return _simple_ols(_instrument_column(data), data.d)


def reduced_form(data: Dataset) -> tuple[float, float, float]:
    """OLS of Y on (1, Z): returns (rf0_hat, rf1_hat, sigma_red_hat).

    The slope estimates beta1 * pi1; the residual sd estimates sigma_red
    where sigma_red^2 = beta1^2 sigma_eta^2 + sigma_eps^2 + 2 beta1 err_cov.
    """
    return _simple_ols(_instrument_column(data), data.y)


def _fit_scalar(data: Dataset, lambda_n: float) -> Estimate:
    z = _instrument_column(data)
    numerator = demeaned_cov(data.y, z)
    cov_dz = demeaned_cov(data.d, z)
    beta1_hat = shifted_ratio(numerator, cov_dz, lambda_n / data.n)
    _, pi1_hat, sigma_eta_hat = first_stage(data)
    _, _, sigma_red_hat = reduced_form(data)
    resid = (data.y - data.y.mean()) - beta1_hat * (data.d - data.d.mean())
    sigma_eps_hat = float(np.sqrt(np.mean(resid**2)))
    return Estimate(
        beta1_hat=beta1_hat,
        numerator=numerator,
        denominator=cov_dz + lambda_n / data.n,
        lambda_n=lambda_n,
        n=data.n,
        pi1_hat=pi1_hat,
        sigma_eta_hat=sigma_eta_hat,
        sigma_red_hat=sigma_red_hat,
        sigma_eps_hat=sigma_eps_hat,
    )


def fit_2sls(data: Dataset) -> Estimate:
    """Just-identified 2SLS: the ratio Cov[Y,Z] / Cov[D,Z].

    Large or extreme values are returned as-is; only an exactly-zero
    denominator raises.
    """
    return fit_ridge_iv(data, PenaltySchedule(PenaltyRate.CONSTANT, 0.0))


def fit_ridge_iv(data: Dataset, schedule: PenaltySchedule) -> Estimate:
    """Penalized ratio estimator Cov[Y,Z] / (Cov[D,Z] + lambda_n(n)/n)."""
    return _fit_scalar(data, float(schedule.lambda_n(data.n)))


def solve_shifted(a: np.ndarray, b: np.ndarray, lam: float) -> np.ndarray:
    """Solve (a + lam * I) x = b by pivoted dense factorization.

    ``a`` is a small square cross-moment matrix (k is never more than ~10
    here, so a direct LU solve is appropriate).
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if lam < 0:
        raise ValueError(f"penalty must be nonnegative, got {lam}")
    b = np.asarray(b, dtype=np.float64).reshape(a.shape[0])
    shifted = a + lam * np.eye(a.shape[0])
    try:
        return np.linalg.solve(shifted, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"shifted system is singular: {exc}") from exc


def fit_ridge_iv_matrix(data: Dataset, lam: float) -> np.ndarray:
    """Penalized just-identified estimator (Z'D + lam I)^{-1} Z'Y.

    Works on the arrays exactly as stored (no demeaning), so on demeaned
    single-instrument data with ``lam = lambda_n`` it agrees with
    :func:`fit_ridge_iv`.  ``data`` must be square in the sense that the
    instrument count matches the single endogenous regressor (k = 1); the
    general k x k solve is exposed via :func:`solve_shifted`.
    """
    if data.k != 1:
        raise ValueError(
            f"Z'D must be square: one endogenous regressor needs k = 1, got k = {data.k}"
        )
    zd = data.z.T @ data.d.reshape(-1, 1)
    zy = data.z.T @ data.y
    return solve_shifted(zd, zy, lam)


def fit_ridge_iv_overidentified(data: Dataset, lam: float) -> np.ndarray:
    """Penalized over-identified estimator.

    Solves (D'Z (Z'Z)^{-1} Z'D + lam I) x = D'Z (Z'Z)^{-1} Z'Y on raw
    uncentered arrays; lam = 0 reproduces textbook 2SLS.
    """
    z = data.z
    d = data.d.reshape(-1, 1)
    zz = z.T @ z
    zd = z.T @ d
    zy = (z.T @ data.y).reshape(-1, 1)
    try:
        solved = np.linalg.solve(zz, np.hstack([zd, zy]))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"Z'Z is singular: {exc}") from exc
    a = zd.T @ solved[:, :1]
    b = zd.T @ solved[:, 1]
    return solve_shifted(a, b, lam)


def _uncentered_sums(data: Dataset) -> tuple[float, float]:
    z = _instrument_column(data)
    return float(z @ data.d), float(z @ data.y)


def gmm_objective(data: Dataset, beta: float, gamma: float) -> float:
    """Penalized moment objective (sum_i Z_i (Y_i - D_i beta))^2 + gamma * beta^2.

    Uses raw uncentered sums (no intercepts).
    """
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    z = _instrument_column(data)
    moment = float(z @ (data.y - data.d * beta))
    return moment**2 + gamma * beta**2


def gmm_minimize(data: Dataset, gamma: float) -> float:
    """Closed-form minimizer of :func:`gmm_objective`.

    The objective is a convex quadratic in beta; its minimizer is
    (sum ZD)(sum ZY) / ((sum ZD)^2 + gamma).
    """
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    szd, szy = _uncentered_sums(data)
    denominator = szd**2 + gamma
    if denominator == 0.0:
        raise DegenerateDenominatorError(
            "sum(Z*D) and gamma are both zero; the objective has no unique minimizer"
        )
    return szd * szy / denominator


def lagrange_correspondence(data: Dataset, lambda_n: float) -> float:
    """Map the denominator penalty lambda_n to the multiplier gamma_n.

    gamma_n = (sum_i Z_i D_i / n) * lambda_n, so that
    ``gmm_minimize(data, gamma_n)`` equals the uncentered penalized ratio
    sum(ZY) / (sum(ZD) + lambda_n / n).
    """
    szd, _ = _uncentered_sums(data)
    return (szd / data.n) * lambda_n
