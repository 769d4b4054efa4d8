"""Built-in oracle suite: fast cross-checks of every numerical core.

Each check recomputes a quantity through an independent route
(quadrature, brute-force enumeration, dense linear algebra, direct
formula substitution) and compares.  `run_all` prints one PASS/FAIL
line per check; the CLI maps any failure to exit code 3.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.integrate import quad

from .ensemble import NetworkConfig, build_power_pattern, build_sigma, unitary_basis
from .recovery import SolverOptions, bpdn_solve, l0_oracle_solve, soft_threshold
from .spectra import (
    RestrictedSpectrum,
    dft_norm_sq,
    mean_cosine_phases,
    restricted_eigs_exact,
    rip_maps,
    rip_maps_inverse,
)
from .stochastic import (
    TruncatedGaussianParams,
    sample_complex_gaussian,
    sample_truncated_gaussian,
    truncated_gaussian_cgf,
    truncated_gaussian_pdf,
)
from .streams import substream
from .theory import BoundConstants, DelayQuery, achievable_delay, measurement_bound, mse_threshold

__all__ = ["run_all", "CHECKS"]


def _trunc_pdf(x, mu, omega):
    # independent density formula for the quadrature oracles
    from scipy.special import erfc

    norm = 1.0 - 0.5 * erfc(mu / omega / math.sqrt(2.0))
    return math.exp(-((x - mu) ** 2) / (2 * omega**2)) / (math.sqrt(2 * math.pi) * omega * norm)


def check_truncated_mean():
    params = TruncatedGaussianParams(mu=0.2, omega=0.1)
    oracle, _ = quad(lambda x: x * _trunc_pdf(x, 0.2, 0.1), 0.0, 0.2 + 12 * 0.1)
    draws = sample_truncated_gaussian(params, substream(7, "verify", "tg"), size=(200_000,))
    err = abs(draws.mean() - oracle) / oracle
    return err < 5e-3, f"sample mean vs quadrature rel err {err:.2e}"


def check_cgf():
    worst = 0.0
    for d in (1.0, 2.0, 3.0):
        params = TruncatedGaussianParams.from_homogeneity(mu=0.2, d=d)
        for s in (-10.0, -1.0, 0.5, 5.0, 20.0, 50.0):
            val = truncated_gaussian_cgf(params, s)
            upper = params.mu + 12 * params.omega + max(s, 0.0) * params.omega**2
            oracle, _ = quad(
                lambda x: math.exp(s * x) * _trunc_pdf(x, params.mu, params.omega),
                0.0, upper, limit=200,
            )
            worst = max(worst, abs(val - math.log(oracle)) / max(1.0, abs(val)))
    return worst < 1e-8, f"CGF vs quadrature worst rel err {worst:.2e}"


def check_exact_enumeration():
    rng = substream(11, "verify", "enum")
    config = NetworkConfig.stochastic(n=12, k=2, p=0.8, mu=0.2, d=2.0)
    pattern = build_power_pattern(config, rng)
    sigma = build_sigma(pattern, unitary_basis(12, "dft"))
    spec = restricted_eigs_exact(sigma, 2)
    lo, hi = math.inf, -math.inf
    for t in itertools.combinations(range(12), 2):
        sub = sigma[:, t]
        eigs = np.linalg.eigvalsh(sub.conj().T @ sub)
        lo, hi = min(lo, eigs[0]), max(hi, eigs[-1])
    ok = abs(spec.rho_max - hi) < 1e-10 and abs(spec.rho_min - lo) < 1e-10
    return ok, f"enumeration vs brute force: ({spec.rho_max:.6f},{spec.rho_min:.6f}) vs ({hi:.6f},{lo:.6f})"


def check_closed_form_norm():
    rng = substream(13, "verify", "norm")
    config = NetworkConfig.stochastic(n=32, k=3, p=0.8, mu=0.2, d=2.0)
    pattern = build_power_pattern(config, rng)
    sigma = build_sigma(pattern, unitary_basis(32, "dft"))
    worst = 0.0
    for _ in range(20):
        support = rng.choice(32, size=3, replace=False)
        v = np.zeros(32, dtype=complex)
        v[support] = np.exp(2j * math.pi * rng.random(3)) / math.sqrt(3)
        dense = float(np.linalg.norm(sigma @ v) ** 2)
        worst = max(worst, abs(dft_norm_sq(pattern.gamma, v) - dense) / dense)
    return worst < 1e-10, f"closed form vs dense worst rel err {worst:.2e}"


def check_ric_maps():
    spectrum = RestrictedSpectrum(k=5, rho_max=1.09, rho_min=0.88, method="sampled", supports_examined=0)
    worst = 0.0
    for delta in np.linspace(0.13, 0.99, 40):
        params = rip_maps(spectrum, float(delta))
        line_min = min(1 - (1 - delta) / 0.88, (1 + delta) / 1.09 - 1)
        worst = max(worst, abs(params.beta_k - line_min), abs(rip_maps_inverse(spectrum, params.beta_k) - delta))
    return worst < 1e-12, f"piecewise map vs min-of-lines / roundtrip worst err {worst:.2e}"


def check_delay_consistency():
    spectrum = RestrictedSpectrum(k=5, rho_max=1.09, rho_min=0.88, method="sampled", supports_examined=0)
    constants = BoundConstants()
    worst = 0.0
    for snr_db in (20.0, 25.0, 30.0):
        snr = 10.0 ** (snr_db / 10.0)
        for eps in np.geomspace(2.0 * mse_threshold(snr), 0.5, 25):
            query = DelayQuery(epsilon=float(eps), snr_ave=snr, spectrum=spectrum, k=5, n=500, p=0.8)
            delay = achievable_delay(query)
            root = 1.0 / math.sqrt(eps * snr)
            delta_star = 0.307 - root
            xi = max(1 - 0.88, 1.09 - 1)
            if delta_star <= xi:
                ok = math.isinf(delay)
                worst = max(worst, 0.0 if ok else math.inf)
                continue
            zeta = max(0.0, (2 - 1.09 - 0.88) / (1.09 - 0.88))
            vartheta = (1 + zeta) * 1.09 - 1
            if delta_star < vartheta:
                beta = 1.0 - ((1.0 - 0.307) + root) / 0.88
            else:
                beta = ((1.0 + 0.307) - root) / 1.09 - 1.0
            direct = measurement_bound(5, 500, 0.8, beta, spectrum, constants)
            worst = max(worst, abs(delay - direct) / direct)
    return worst < 1e-12, f"delay vs bound-composed-with-map worst rel err {worst:.2e}"


def check_homogeneous_degeneracy():
    config = NetworkConfig.homogeneous(n=24, k=3, p=1.0, gamma=2.5)
    pattern = build_power_pattern(config)
    sigma = build_sigma(pattern, unitary_basis(24, "dft"))
    spec = restricted_eigs_exact(sigma, 3)
    params = rip_maps(spec, 0.3) if spec.rho_max - 1 < 0.3 else None
    ok = (
        abs(spec.rho_max - 1) < 1e-10
        and abs(spec.rho_min - 1) < 1e-10
        and params is not None
        and abs(params.beta_k - 0.3) < 1e-10
    )
    return ok, f"homogeneous spectrum ({spec.rho_max:.2e},{spec.rho_min:.2e}), beta(0.3) = {params.beta_k if params else None}"


def check_phase_sums():
    worst = max(
        abs(mean_cosine_phases(n, delta, theta))
        for n in (8, 127, 500)
        for delta in (1, 3, n - 1)
        for theta in (0.0, 0.7, 4.4)
    )
    return worst < 1e-10, f"cosine phase means worst |value| {worst:.2e}"


def check_soft_threshold():
    rng = substream(17, "verify", "soft")
    z = sample_complex_gaussian(4.0, rng, size=(256,))
    out = soft_threshold(z, 0.5)
    mags_ok = np.allclose(np.abs(out), np.maximum(np.abs(z) - 0.5, 0.0), atol=1e-12)
    nz = np.abs(out) > 0
    phase_ok = np.allclose(np.angle(out[nz]), np.angle(z[nz]), atol=1e-12)
    real = soft_threshold(np.array([-2.0, -0.2, 0.3, 1.4]), 0.5)
    real_ok = np.allclose(real, [-1.5, 0.0, 0.0, 0.9], atol=1e-15)
    ok = bool(mags_ok and phase_ok and real_ok)
    return ok, "modulus shrink / phase preservation / real reduction"


def check_oracle_dominance():
    rng = substream(19, "verify", "oracle")
    ok = True
    detail = []
    for _ in range(3):
        a = sample_complex_gaussian(1.0, rng, size=(8, 16)) / math.sqrt(8)
        x = np.zeros(16, dtype=complex)
        x[rng.choice(16, 2, replace=False)] = np.exp(2j * math.pi * rng.random(2))
        noise = sample_complex_gaussian(1e-4, rng, size=(8,))
        y = a @ x + noise
        # eta at the realized noise norm: the decoder matches it, the
        # exhaustive search fits at or below it
        eta = float(np.linalg.norm(noise))
        res = bpdn_solve(a, y, SolverOptions(mode="constrained", eta_or_lambda=eta))
        x0 = l0_oracle_solve(a, y, 2)
        r_oracle = float(np.linalg.norm(a @ x0 - y))
        ok = ok and r_oracle <= res.final_residual + 1e-9
        detail.append(f"{r_oracle:.3e}<={res.final_residual:.3e}")
    return ok, "l0 oracle residual <= decoder residual: " + ", ".join(detail)


def check_stream_determinism():
    a = substream(123, "verify", "det", 4).standard_normal(8)
    b = substream(123, "verify", "det", 4).standard_normal(8)
    c = substream(123, "verify", "det", 5).standard_normal(8)
    ok = bool(np.array_equal(a, b) and not np.array_equal(a, c))
    return ok, "identical path replays bit-identically, sibling path differs"


def check_truncated_pdf_normalization():
    params = TruncatedGaussianParams(mu=0.2, omega=0.2)
    total, _ = quad(lambda x: truncated_gaussian_pdf(x, params), 0.0, 0.2 + 12 * 0.2)
    return abs(total - 1.0) < 1e-10, f"pdf integrates to {total:.12f}"


CHECKS = [
    ("truncated-gaussian-mean", check_truncated_mean),
    ("truncated-gaussian-pdf-normalization", check_truncated_pdf_normalization),
    ("cgf-vs-quadrature", check_cgf),
    ("exact-enumeration-vs-brute-force", check_exact_enumeration),
    ("closed-form-norm-vs-dense", check_closed_form_norm),
    ("ric-map-roundtrip", check_ric_maps),
    ("delay-bound-consistency", check_delay_consistency),
    ("homogeneous-degeneracy", check_homogeneous_degeneracy),
    ("cosine-phase-sums", check_phase_sums),
    ("complex-soft-threshold", check_soft_threshold),
    ("l0-oracle-dominance", check_oracle_dominance),
    ("stream-determinism", check_stream_determinism),
]


def run_all(print_fn=print) -> bool:
    """Run every check; returns True when all pass."""
    all_ok = True
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        print_fn(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return all_ok
