"""Construction of the sensing ensemble and sparse measurement instances.

Model summary.  n sensors hold a signal s = Psi x with x k-sparse in a
unitary basis Psi.  In slot i sensor j transmits its datum scaled by a
random selection-and-weight amplitude phi_ij over a Rayleigh channel
h_ij, so after m slots the receiver sees y = (H o Phi) Psi x + e, with
o the elementwise product.  Factoring out per-sensor scale gives

    Z = H o Phi = sqrt(m) * Ztilde * Gamma,
    Gamma = diag(sqrt(gamma_j)),   gamma_j = p * b_j * nu_j^2,

where Ztilde has i.i.d. entries whose real/imag parts are mixed
Gaussian(0, 1/(2pm), p) sharing the transmission (zero) event.  With
P_ave = mean(gamma) the normalized model is

    ytilde = Ztilde * Sigma * x + etilde,   Sigma = Gamma Psi / sqrt(P_ave),

and the per-entry complex noise variance is sigma^2 / (m * P_ave)
= 1 / (m * SNR_ave).  ||Sigma||_F^2 = n always; a homogeneous power
pattern makes Sigma unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .errors import EnergyConstraintError, ParameterError
from .stochastic import TruncatedGaussianParams, sample_complex_gaussian, sample_truncated_gaussian

__all__ = [
    "ExplicitPowerModel",
    "StochasticPowerModel",
    "NetworkConfig",
    "PowerPattern",
    "SensingEnsemble",
    "SparseInstance",
    "build_power_pattern",
    "unitary_basis",
    "build_sigma",
    "build_sensing_ensemble",
    "build_channel_and_sw",
    "sample_sparse_instance",
]

BASES = ("dft", "dct", "identity", "custom")
AMPLITUDE_MODES = ("unit-norm", "unit-modulus")


@dataclass(frozen=True)
class ExplicitPowerModel:
    """Per-sensor squared amplitudes b, channel stds nu, energy budgets e.

    e defaults to the tight budget p*b (set at config validation).
    """

    b: np.ndarray
    nu: np.ndarray
    e: np.ndarray | None = None


@dataclass(frozen=True)
class StochasticPowerModel:
    """Receive powers gamma_j drawn i.i.d. truncated Gaussian."""

    gamma_params: TruncatedGaussianParams


@dataclass(frozen=True)
class NetworkConfig:
    """Scenario parameters for one sensing setup.

    Exactly one of ``sigma2`` (absolute noise variance, >= 0) or
    ``snr_db`` (target average SNR; per-realization sigma^2 =
    P_ave * 10^(-snr_db/10)) may be set; both None is allowed for
    noise-free constructions (spectrum studies).
    """

    n: int
    k: int
    p: float
    power_model: ExplicitPowerModel | StochasticPowerModel
    sigma2: float | None = None
    snr_db: float | None = None
    basis: str = "dft"
    custom_basis: np.ndarray | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError(f"need at least 2 sensors, got n={self.n}")
        if not 1 <= self.k < self.n // 2:
            raise ParameterError(f"sparsity must satisfy 1 <= k < floor(n/2), got k={self.k}, n={self.n}")
        if not 0.0 < self.p <= 1.0:
            raise ParameterError(f"transmit probability p must be in (0, 1], got {self.p}")
        if self.sigma2 is not None and self.snr_db is not None:
            raise ParameterError("set sigma2 or snr_db, not both")
        if self.sigma2 is not None and self.sigma2 < 0.0:
            raise ParameterError(f"noise variance sigma2 must be >= 0, got {self.sigma2}")
        if self.basis not in BASES:
            raise ParameterError(f"unsupported basis {self.basis!r}, expected one of {BASES}")
        if self.basis == "custom" and self.custom_basis is None:
            raise ParameterError("basis='custom' requires custom_basis")
        pm = self.power_model
        if isinstance(pm, ExplicitPowerModel):
            b = np.asarray(pm.b, dtype=float)
            nu = np.asarray(pm.nu, dtype=float)
            if b.shape != (self.n,) or nu.shape != (self.n,):
                raise ParameterError("explicit power model must give b and nu per sensor")
            if np.any(b < 0.0) or np.any(nu < 0.0):
                raise ParameterError("b and nu must be nonnegative")
            e = np.asarray(pm.e, dtype=float) if pm.e is not None else self.p * b
            if e.shape != (self.n,):
                raise ParameterError("explicit power model must give e per sensor")
            if np.any(self.p * b > e * (1.0 + 1e-12)):
                j = int(np.argmax(self.p * b - e))
                raise EnergyConstraintError(
                    f"sensor {j}: p*b = {self.p * b[j]} exceeds available energy e = {e[j]}"
                )
            object.__setattr__(self, "power_model", ExplicitPowerModel(b=b, nu=nu, e=e))
        elif not isinstance(pm, StochasticPowerModel):
            raise ParameterError("power_model must be ExplicitPowerModel or StochasticPowerModel")

    @classmethod
    def homogeneous(cls, n, k, p, gamma=1.0, **kw) -> "NetworkConfig":
        """All sensors at equal receive power gamma (b = gamma/p, nu = 1)."""
        b = np.full(n, gamma / p)
        nu = np.ones(n)
        return cls(n=n, k=k, p=p, power_model=ExplicitPowerModel(b=b, nu=nu), **kw)

    @classmethod
    def stochastic(cls, n, k, p, mu, d, **kw) -> "NetworkConfig":
        """Receive powers drawn truncated Gaussian with mean mu and homogeneity d = mu/omega."""
        params = TruncatedGaussianParams.from_homogeneity(mu=mu, d=d)
        return cls(n=n, k=k, p=p, power_model=StochasticPowerModel(params), **kw)


@dataclass(frozen=True)
class PowerPattern:
    """One realization of the receive-power pattern gamma with its scalars."""

    gamma: np.ndarray
    p_ave: float
    snr_ave: float | None

    @property
    def n(self) -> int:
        return self.gamma.shape[0]


@dataclass(frozen=True)
class SensingEnsemble:
    """One realization of the normalized sensing model.

    ``a_mat = z_tilde @ sigma_mat`` is the matrix the decoder sees;
    ``z_tilde`` entries are complex mixed Gaussian with per-part
    variance 1/(2pm) and zero exactly when the sensor skipped the slot.
    """

    sigma_mat: np.ndarray
    z_tilde: np.ndarray
    a_mat: np.ndarray
    m: int
    pattern: PowerPattern

    @property
    def n(self) -> int:
        return self.sigma_mat.shape[1]


@dataclass(frozen=True)
class SparseInstance:
    """Ground-truth sparse vector with its noisy measurement."""

    x: np.ndarray
    support: np.ndarray
    y: np.ndarray
    noise: np.ndarray


def build_power_pattern(config: NetworkConfig, rng: np.random.Generator | None = None) -> PowerPattern:
    """Realize the receive-power pattern gamma and its derived scalars.

    Explicit mode is deterministic (gamma_j = p * b_j * nu_j^2, no stream
    reads); stochastic mode draws gamma_j i.i.d. truncated Gaussian.
    snr_ave is P_ave / sigma^2, the configured target when snr_db is set,
    inf for sigma2 = 0, and None when the config carries no noise level.
    """
    pm = config.power_model
    if isinstance(pm, ExplicitPowerModel):
        gamma = config.p * pm.b * pm.nu**2
    else:
        if rng is None:
            raise ParameterError("stochastic power model needs an rng")
        gamma = sample_truncated_gaussian(pm.gamma_params, rng, size=(config.n,))
    p_ave = float(np.mean(gamma))
    if config.snr_db is not None:
        snr_ave = 10.0 ** (config.snr_db / 10.0)
    elif config.sigma2 is not None:
        snr_ave = p_ave / config.sigma2 if config.sigma2 > 0.0 else math.inf
    else:
        snr_ave = None
    return PowerPattern(gamma=gamma, p_ave=p_ave, snr_ave=snr_ave)


def unitary_basis(n: int, basis: str, custom: np.ndarray | None = None) -> np.ndarray:
    """Return the n x n unitary sparsity basis Psi.

    dft: Psi[i, j] = n^{-1/2} exp(-2 pi sqrt(-1) i j / n) (negative
    exponent, unitary scaling -- the convention the closed-form norm
    expansion in `spectra` depends on).  dct: orthonormal DCT-II.
    """
    if n < 1:
        raise ParameterError(f"basis size must be >= 1, got {n}")
    if basis == "dft":
        return np.fft.fft(np.eye(n), axis=0, norm="ortho")
    if basis == "dct":
        return scipy.fft.dct(np.eye(n), axis=0, norm="ortho").astype(complex)
    if basis == "identity":
        return np.eye(n, dtype=complex)
    if basis == "custom":
        if custom is None:
            raise ParameterError("custom basis requested but no matrix given")
        psi = np.asarray(custom, dtype=complex)
        if psi.shape != (n, n):
            raise ParameterError(f"custom basis must be {n}x{n}, got {psi.shape}")
        if not np.allclose(psi.conj().T @ psi, np.eye(n), atol=1e-10):
            raise ParameterError("custom basis is not unitary (tolerance 1e-10)")
        return psi
    raise ParameterError(f"unsupported basis {basis!r}, expected one of {BASES}")


def build_sigma(pattern: PowerPattern, psi: np.ndarray) -> np.ndarray:
    """Normalized matrix Sigma = diag(sqrt(gamma)) Psi / sqrt(P_ave).

    Row j of Psi is scaled by sqrt(gamma_j / P_ave), so ||Sigma||_F^2 = n
    exactly; a homogeneous pattern gives back a unitary Sigma.
    """
    if pattern.p_ave <= 0.0:
        raise ParameterError("average receive power is zero; Sigma undefined")
    if psi.shape != (pattern.n, pattern.n):
        raise ParameterError(f"basis shape {psi.shape} does not match pattern size {pattern.n}")
    scale = np.sqrt(pattern.gamma / pattern.p_ave)
    return scale[:, None] * psi


def _draw_normalized_factors(rng: np.random.Generator, m: int, n: int, p: float):
    """Unit-scale channel and SW factors, in the documented draw order.

    Returns (h_tilde, phi_tilde): h_tilde has i.i.d. circular complex
    Gaussian entries with E|h|^2 = 1 (real parts drawn first, then
    imaginary); phi_tilde entries are +/- 1/sqrt(p) w.p. p/2 each, else 0,
    from a single uniform per entry.
    """
    h_tilde = sample_complex_gaussian(1.0, rng, size=(m, n))
    u = rng.random((m, n))
    amp = 1.0 / math.sqrt(p)
    phi_tilde = np.where(u < 0.5 * p, amp, np.where(u < p, -amp, 0.0))
    return h_tilde, phi_tilde


def build_sensing_ensemble(
    config: NetworkConfig,
    m: int,
    rng: np.random.Generator,
    pattern: PowerPattern | None = None,
) -> SensingEnsemble:
    """Draw one sensing ensemble with m measurement slots.

    Stream reads, in order: power pattern (stochastic mode only, unless
    ``pattern`` is supplied), channel real parts, channel imaginary
    parts, SW uniforms.  `build_channel_and_sw` consumes the same draws
    in the same order, so the unnormalized and normalized constructions
    match realization-for-realization.
    """
    if m < 1:
        raise ParameterError(f"need at least one measurement slot, got m={m}")
    if pattern is None:
        pattern = build_power_pattern(config, rng)
    h_tilde, phi_tilde = _draw_normalized_factors(rng, m, config.n, config.p)
    z_tilde = (h_tilde * phi_tilde) / math.sqrt(m)
    psi = unitary_basis(config.n, config.basis, config.custom_basis)
    sigma_mat = build_sigma(pattern, psi)
    a_mat = z_tilde @ sigma_mat
    return SensingEnsemble(sigma_mat=sigma_mat, z_tilde=z_tilde, a_mat=a_mat, m=m, pattern=pattern)


def build_channel_and_sw(config: NetworkConfig, m: int, rng: np.random.Generator):
    """Draw the unnormalized channel H and SW matrix Phi (explicit mode only).

    Uses the same substream reads as `build_sensing_ensemble`, so with a
    generator seeded identically, H o Phi equals sqrt(m) * z_tilde *
    diag(sqrt(gamma)) of the ensemble built from the other path.
    """
    pm = config.power_model
    if not isinstance(pm, ExplicitPowerModel):
        raise ParameterError("explicit (b, nu) factorization requires an ExplicitPowerModel")
    h_tilde, phi_tilde = _draw_normalized_factors(rng, m, config.n, config.p)
    h = h_tilde * pm.nu[None, :]
    phi = phi_tilde * np.sqrt(config.p * pm.b)[None, :]
    return h, phi


def sample_sparse_instance(
    ensemble: SensingEnsemble,
    config: NetworkConfig,
    rng: np.random.Generator,
    amplitude_mode: str = "unit-norm",
) -> SparseInstance:
    """Draw a k-sparse ground truth and its noisy measurement.

    Support is uniform without replacement; nonzeros have equal moduli
    (1/sqrt(k) in unit-norm mode so ||x||_2 = 1, or 1 in unit-modulus
    mode) and i.i.d. phases uniform on (0, 2pi].  Noise is circular
    complex Gaussian with per-entry variance 1/(m * SNR_ave).  Stream
    reads: support, phases, noise (real then imaginary).
    """
    if amplitude_mode not in AMPLITUDE_MODES:
        raise ParameterError(f"unknown amplitude mode {amplitude_mode!r}, expected {AMPLITUDE_MODES}")
    n, k = ensemble.n, config.k
    if not 1 <= k < n // 2:
        raise ParameterError(f"sparsity must satisfy 1 <= k < floor(n/2), got k={k}, n={n}")
    support = np.sort(rng.choice(n, size=k, replace=False))
    theta = 2.0 * math.pi * (1.0 - rng.random(k))
    modulus = 1.0 / math.sqrt(k) if amplitude_mode == "unit-norm" else 1.0
    x = np.zeros(n, dtype=complex)
    x[support] = modulus * np.exp(1j * theta)
    snr = ensemble.pattern.snr_ave
    if snr is None:
        raise ParameterError("config carries no noise level (set sigma2 or snr_db)")
    noise_var = 0.0 if math.isinf(snr) else 1.0 / (ensemble.m * snr)
    noise = sample_complex_gaussian(noise_var, rng, size=(ensemble.m,))
    y = ensemble.a_mat @ x + noise
    return SparseInstance(x=x, support=support, y=y, noise=noise)
