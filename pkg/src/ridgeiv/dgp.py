"""Data generation for the linear instrumental-variable model.

The model is

    Y_i = beta0 + beta1 * D_i + eps_i
    D_i = pi0  + pi1  * Z_i + u_i

with iid draws and instruments independent of both error terms.  The
first-stage disturbance is built constructively as

    u_i = (err_cov / sigma_eps**2) * eps_i + eta_i,

where eta_i is independent of eps_i, so that Cov[u_i, eps_i] = err_cov for
any finite err_cov and the joint error distribution is valid by
construction (no covariance-matrix factorization needed).

Weak-instrument designs are expressed through ``stock_c``: when set, the
first-stage slope at sample size n is c / sqrt(n), so the instrument stays
weak no matter how large the sample grows.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ZDist",
    "DgpParams",
    "Dataset",
    "generate_dataset",
    "aer_calibration",
]


class ZDist(enum.Enum):
    """Marginal distribution of the instrument."""

    STANDARD_NORMAL = "standard_normal"

    @property
    def fourth_moment(self) -> float:
        """Fourth moment of the instrument (3 for a standard normal)."""
        return 3.0


@dataclass(frozen=True)
class DgpParams:
    """Structural coefficients and error moments of the IV model.

    ``err_cov`` is the (signed) covariance between the composite
    first-stage disturbance and the structural error eps.  ``sigma_eta``
    is the standard deviation of the independent component of the
    first-stage disturbance only; the total first-stage error variance is
    :attr:`first_stage_error_var`.

    ``sigma_eps = 0`` / ``sigma_eta = 0`` are allowed as exact zero-noise
    toggles for testing; ``err_cov`` must then be 0 alongside
    ``sigma_eps = 0``.
    """

    beta0: float
    beta1: float
    pi0: float
    pi1: float
    sigma_eps: float = 1.0
    sigma_eta: float = 1.0
    err_cov: float = 0.0
    z_dist: ZDist = ZDist.STANDARD_NORMAL
    stock_c: float | None = None

    def __post_init__(self) -> None:
        if self.sigma_eps < 0:
            raise ValueError(f"sigma_eps must be nonnegative, got {self.sigma_eps}")
        if self.sigma_eta < 0:
            raise ValueError(f"sigma_eta must be nonnegative, got {self.sigma_eta}")
        if self.sigma_eps == 0.0 and self.err_cov != 0.0:
            raise ValueError(
                "err_cov must be 0 when sigma_eps is 0: a noiseless structural "
                "equation cannot covary with the first stage"
            )

    @property
    def eps_loading(self) -> float:
        """Coefficient on eps in the composite first-stage disturbance."""
        if self.sigma_eps == 0.0:
            return 0.0
        return self.err_cov / self.sigma_eps**2

    @property
    def first_stage_error_var(self) -> float:
        """Variance of the composite first-stage disturbance u."""
        return self.sigma_eta**2 + self.eps_loading**2 * self.sigma_eps**2

    def effective_pi1(self, n: int) -> float:
        """First-stage slope at sample size n (c/sqrt(n) under drift)."""
        if self.stock_c is not None:
            return self.stock_c / math.sqrt(n)
        return self.pi1


@dataclass(frozen=True)
class Dataset:
    """A realized sample: outcome y, endogenous regressor d, instruments z."""

    y: np.ndarray
    d: np.ndarray
    z: np.ndarray

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=np.float64)
        d = np.asarray(self.d, dtype=np.float64)
        z = np.asarray(self.z, dtype=np.float64)
        if z.ndim == 1:
            z = z.reshape(-1, 1)
        if y.ndim != 1 or d.ndim != 1:
            raise ValueError("y and d must be one-dimensional")
        if z.ndim != 2:
            raise ValueError(f"z must be an (n, k) matrix, got shape {z.shape}")
        if not (y.shape[0] == d.shape[0] == z.shape[0]):
            raise ValueError(
                f"length mismatch: y has {y.shape[0]}, d has {d.shape[0]}, "
                f"z has {z.shape[0]} rows"
            )
        if y.shape[0] < 3:
            raise ValueError(f"need at least 3 observations, got {y.shape[0]}")
        if z.shape[1] < 1:
            raise ValueError("need at least one instrument")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def k(self) -> int:
        return self.z.shape[1]


def generate_dataset(params: DgpParams, n: int, seed: int) -> Dataset:
    """Draw an iid sample of size n from the model.

    Uses a counter-based generator (Philox) keyed by ``seed``, so identical
    ``(params, n, seed)`` produce bit-identical samples regardless of where
    or when the call happens.  Draw order is fixed: instruments, then eps,
    then eta.

    Parameters
    ----------
    params : DgpParams
        Structural coefficients and error moments.
    n : int
        Sample size, at least 3.
    seed : int
        64-bit unsigned seed for the counter-based stream.
    """
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    z = rng.standard_normal(n)
    eps = params.sigma_eps * rng.standard_normal(n)
    eta = params.sigma_eta * rng.standard_normal(n)
    u = params.eps_loading * eps + eta
    d = params.pi0 + params.effective_pi1(n) * z + u
    y = params.beta0 + params.beta1 * d + eps
    return Dataset(y=y, d=d, z=z.reshape(n, 1))


def aer_calibration(beta1: float = 1.0, stock_c: float | None = None) -> DgpParams:
    """Simulation design calibrated to a published AER immigration study.

    Weak first stage (slope 0.072) and a strongly endogenous regressor
    (loading -0.67 on the structural error); all primitive shocks are unit
    normals.
    """
    return DgpParams(
        beta0=2.83,
        beta1=beta1,
        pi0=-0.346,
        pi1=0.072,
        sigma_eps=1.0,
        sigma_eta=1.0,
        err_cov=-0.67,
        stock_c=stock_c,
    )
