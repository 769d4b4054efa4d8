"""Closed-form evaluation of the recovery guarantees.

All functions here are pure and deterministic: the sufficient
measurement count and success probability for the restricted isometry
to hold, the decoder MSE bound, the achievable delay (minimum
measurements meeting a target MSE), and the large-deviation tail
exponent of the restricted eigenvalues.

The two universal constants of the measurement bound are never
instantiated by the analysis, so they are explicit inputs (default 1);
absolute measurement counts and delays are meaningful up to c1, while
trends, ratios, and branch structure are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleRicError, ParameterError
from .spectra import RestrictedSpectrum, rip_maps

__all__ = [
    "DELTA_CRITICAL",
    "BoundConstants",
    "DelayQuery",
    "measurement_bound",
    "rip_probability",
    "mse_upper_bound",
    "mse_threshold",
    "achievable_delay",
    "ld_exponent",
    "ld_tail_bound",
]

# RIC below which the l1 decoder's MSE bound applies.  The threshold
# MSE constant is kept as DELTA_CRITICAL**2 (= 0.094249) rather than its
# rounded 3-digit form so the delay and measurement bounds compose
# exactly.
DELTA_CRITICAL = 0.307


@dataclass(frozen=True)
class BoundConstants:
    """Universal constants of the measurement bound, user-supplied knobs."""

    c1: float = 1.0
    c2: float = 1.0

    def __post_init__(self):
        if self.c1 <= 0.0 or self.c2 <= 0.0:
            raise ParameterError(f"constants must be positive, got c1={self.c1}, c2={self.c2}")


@dataclass(frozen=True)
class DelayQuery:
    """Inputs for the achievable-delay evaluation."""

    epsilon: float
    snr_ave: float
    spectrum: RestrictedSpectrum
    k: int
    n: int
    p: float
    constants: BoundConstants = field(default_factory=BoundConstants)

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ParameterError(f"allowable MSE epsilon must be > 0, got {self.epsilon}")
        if self.snr_ave <= 0.0:
            raise ParameterError(f"snr_ave must be > 0, got {self.snr_ave}")


def measurement_bound(
    k: int,
    n: int,
    p: float,
    beta_k: float,
    spectrum: RestrictedSpectrum,
    constants: BoundConstants = BoundConstants(),
) -> float:
    """Sufficient number of measurements for the restricted isometry.

    Returns c1 * k * rho_max / (p^2 beta_k^2 rho_min) * log(5 e n / k)
    as a real number; callers take the ceiling.  Linear in the
    restricted condition number rho_max/rho_min; reduces to
    c1 * k / (p^2 delta^2) * log(5 e n / k) in the homogeneous case
    (where beta = delta).
    """
    if not 0.0 < beta_k < 1.0:
        raise ParameterError(f"beta_k must be in (0, 1), got {beta_k}")
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"transmit probability p must be in (0, 1], got {p}")
    if spectrum.rho_min <= 0.0:
        raise InfeasibleRicError(f"rho_min = {spectrum.rho_min} <= 0")
    return (
        constants.c1
        * k
        * spectrum.rho_max
        / (p**2 * beta_k**2 * spectrum.rho_min)
        * math.log(5.0 * math.e * n / k)
    )


def rip_probability(
    m: float, p: float, beta_k: float, constants: BoundConstants = BoundConstants()
) -> float:
    """Probability that the restricted isometry holds at m measurements.

    1 - exp(-c2 m p^2 beta_k^2 / 4): increasing in m, p, and beta_k;
    doubling m squares the failure term.
    """
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    return 1.0 - math.exp(-constants.c2 * m * p**2 * beta_k**2 / 4.0)


def mse_upper_bound(delta_k: float, snr_ave: float) -> float:
    """Decoder MSE bound 1 / (snr_ave * (0.307 - delta_k)^2).

    Valid for RIC delta_k < 0.307; diverges at the critical RIC.
    """
    if delta_k >= DELTA_CRITICAL:
        raise InfeasibleRicError(
            f"MSE bound requires delta_k < {DELTA_CRITICAL}, got {delta_k}"
        )
    if snr_ave <= 0.0:
        raise ParameterError(f"snr_ave must be > 0, got {snr_ave}")
    return 1.0 / (snr_ave * (DELTA_CRITICAL - delta_k) ** 2)


def mse_threshold(snr_ave: float) -> float:
    """Smallest achievable MSE bound: mse_upper_bound at delta_k = 0."""
    if snr_ave <= 0.0:
        raise ParameterError(f"snr_ave must be > 0, got {snr_ave}")
    return 1.0 / (snr_ave * DELTA_CRITICAL**2)


def achievable_delay(query: DelayQuery) -> float:
    """Minimum measurement count meeting MSE epsilon, or inf.

    Composes the MSE bound with the measurement bound: the target RIC is
    delta* = 0.307 - 1/sqrt(epsilon * snr_ave), mapped through the
    piecewise modified-RIC branch selected by delta*'s interval.
    Infinite when epsilon <= the MSE threshold (a perfect isometry would
    be required, a probability-zero event) and also when delta* does not
    exceed the spectrum's infeasibility floor xi_k, where no finite
    measurement count is certified.
    """
    eps_th = mse_threshold(query.snr_ave)
    if query.epsilon <= eps_th:
        return math.inf
    delta_star = DELTA_CRITICAL - 1.0 / math.sqrt(query.epsilon * query.snr_ave)
    spectrum = query.spectrum
    xi = max(1.0 - spectrum.rho_min, spectrum.rho_max - 1.0)
    if delta_star <= xi:
        return math.inf
    params = rip_maps(spectrum, delta_star)
    # identical branch arithmetic as the direct Corollary form:
    # 1 - (0.693 + 1/sqrt(eps snr))/rho_min  or  (1.307 - 1/sqrt(eps snr))/rho_max - 1
    return measurement_bound(query.k, query.n, query.p, params.beta_k, spectrum, query.constants)


def ld_exponent(k: int, t: float) -> float:
    """Tail-rate factor E(k, t) = t / (k - 1 + sqrt(2) t).

    Increasing in t, decreasing in k; equals 1/sqrt(2) for k = 1.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if t <= 0.0:
        raise ParameterError(f"t must be > 0, got {t}")
    return t / (k - 1 + math.sqrt(2.0) * t)


def ld_tail_bound(k: int, t: float, d: float, n: int) -> float:
    """Asymptotic bound exp(-n d^2 E(k,t)^2) on P(rho_max(k,n) > 1+t).

    An asymptotic exponent (valid as the normalized log-tail limit), not
    a finite-n certificate.  The exponent scales with d^2, so log-tail
    slopes for d = 1, 2, 3 stand in ratio 1:4:9.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if d <= 0.0:
        raise ParameterError(f"homogeneity d must be > 0, got {d}")
    return math.exp(-n * d**2 * ld_exponent(k, t) ** 2)
