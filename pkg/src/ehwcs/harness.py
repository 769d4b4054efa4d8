"""Seeded Monte Carlo experiment runner.

Each experiment kind consumes an `ExperimentSpec` and produces an
`ExperimentResult`: an aggregate table (the CSV body), per-trial
records where the kind has them, and sidecar metadata (fits, medians,
non-convergence counts).

Reproducibility contract.  Every random draw of a trial comes from
`streams.substream(master_seed, kind, role, ...coordinates..., trial)`;
no draw depends on the measurement count m, the SNR, worker count, or
scheduling, so

* rerunning with any worker count yields byte-identical CSV files
  (wall-clock timing lives only in the JSON sidecar);
* any single trial can be replayed in isolation (`replay_trial`);
* curves that share a trial index share their channel/selection/noise
  randomness (common random numbers): measurement rows are sliced from
  one max-m draw, sparse supports are nested across k, and noise
  realizations are rescaled across SNR, which makes the documented
  monotonicity comparisons nearly paired.

Adaptive tail estimation runs each grid point sequentially (points in
parallel), adding trials until the exceedance target or the trial cap
is reached, so the trial count per point is itself deterministic.

CSV layout: a comment header block (# version / kind / spec-hash /
master-seed / columns), one header row, then data rows; floats are
written with shortest round-trip repr and infinities as ``inf``.
Column order per kind is the ``COLUMNS`` table below.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from functools import partial

import numpy as np

from ._version import __version__
from .errors import ParameterError
from .ensemble import NetworkConfig
from .recovery import SolverOptions, bpdn_solve, mse
from .specfile import ExperimentSpec
from .spectra import (
    RestrictedSpectrum,
    dft_gram_row,
    restricted_eigs_pair_exact_dft,
    rip_maps,
    sample_supports,
)
from .stochastic import TruncatedGaussianParams, sample_complex_gaussian, sample_truncated_gaussian
from .streams import stream_key, substream
from .theory import (
    DELTA_CRITICAL,
    BoundConstants,
    DelayQuery,
    achievable_delay,
    ld_exponent,
    mse_threshold,
)

__all__ = [
    "TrialRecord",
    "ExperimentResult",
    "COLUMNS",
    "spec_hash",
    "run_experiment",
    "run_mse_sweep",
    "run_homog_vs_inhomog",
    "run_eig_cdf",
    "run_tail_scaling",
    "run_ld_verify",
    "run_delay_curve",
    "replay_trial",
    "write_result",
]

COLUMNS = {
    "mse-sweep": ("m", "k", "snr_db", "trials", "mean_mse", "stderr_mse", "nonconverged"),
    "homog-vs-inhomog": (
        "m", "k", "snr_db", "trials",
        "mean_mse_homog", "stderr_homog", "mean_mse_inhomog", "stderr_inhomog",
        "gap", "nonconverged",
    ),
    "eig-cdf": ("d", "k", "trial", "seed_key", "rho_max", "rho_min"),
    "tail-scaling": ("n", "d", "trials", "exceedances", "p_hat", "log_p", "low_confidence"),
    "ld-verify": (
        "n", "d", "k", "t", "trials", "exceedances", "p_hat",
        "log_p_over_n", "bound_exponent", "consistent", "low_confidence",
    ),
    "delay-curve": ("epsilon", "snr_db", "eps_threshold", "delta_star", "beta", "delay"),
}


@dataclass(frozen=True)
class TrialRecord:
    """One Monte Carlo trial outcome at one grid point.

    (master_seed, coords, trial) fully determines every random draw, so
    the record is replayable.  ``elapsed`` is wall-clock seconds and is
    never written into CSV bodies.
    """

    experiment: str
    coords: tuple
    trial: int
    seed_key: str
    mse: float | None = None
    iterations: int | None = None
    converged: bool | None = None
    rho_max: float | None = None
    rho_min: float | None = None
    elapsed: float = 0.0


@dataclass
class ExperimentResult:
    kind: str
    columns: tuple
    rows: list
    records: list
    meta: dict
    spec: ExperimentSpec


def base_config(spec: ExperimentSpec) -> NetworkConfig:
    """NetworkConfig equivalent of the spec's scenario block."""
    k = spec.k_values[0] if spec.k_values else spec.k
    if spec.power == "homogeneous":
        return NetworkConfig.homogeneous(n=spec.n, k=k, p=spec.p, basis=spec.basis)
    return NetworkConfig.stochastic(n=spec.n, k=k, p=spec.p, mu=spec.mu, d=spec.d, basis=spec.basis)


def spec_hash(spec: ExperimentSpec) -> str:
    """Hash of every result-affecting spec field (out/workers excluded)."""
    skip = {"out", "workers"}
    parts = [
        f"{f.name}={getattr(spec, f.name)!r}"
        for f in sorted(fields(spec), key=lambda f: f.name)
        if f.name not in skip
    ]
    return hashlib.sha256("\n".join(parts).encode()).hexdigest()[:16]


def _run_tasks(task_fn, args_list, workers):
    if workers <= 1 or len(args_list) <= 1:
        return [task_fn(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task_fn, args_list, chunksize=1))


# ---------------------------------------------------------------------------
# decoder experiments (mse-sweep, homog-vs-inhomog)
# ---------------------------------------------------------------------------


def _draw_gamma(spec, rng):
    if spec.power == "homogeneous":
        return np.ones(spec.n)
    params = TruncatedGaussianParams.from_homogeneity(mu=spec.mu, d=spec.d)
    return sample_truncated_gaussian(params, rng, size=(spec.n,))


def _sensing_rows(spec, rng, m_max, gamma):
    """Rows of the normalized sensing matrix before the 1/sqrt(m) scale.

    Returns W with W[:m] / sqrt(m) equal to the m-slot sensing matrix.
    Fourier basis applied by FFT along rows; O(m n log n).
    """
    n = spec.n
    h = sample_complex_gaussian(1.0, rng, size=(m_max, n))
    u = rng.random((m_max, n))
    amp = 1.0 / math.sqrt(spec.p)
    phi = np.where(u < 0.5 * spec.p, amp, np.where(u < spec.p, -amp, 0.0))
    mat = (h * phi) * np.sqrt(gamma / np.mean(gamma))[None, :]
    if spec.basis != "dft":
        raise ParameterError("decoder experiments support the dft basis only")
    return np.fft.fft(mat, axis=1, norm="ortho")


def _nested_signals(spec, rng):
    """Sparse truths for every k, supports nested across k."""
    perm = rng.permutation(spec.n)
    k_max = max(spec.k_values)
    theta = 2.0 * math.pi * (1.0 - rng.random(k_max))
    signals = {}
    for k in spec.k_values:
        x = np.zeros(spec.n, dtype=complex)
        modulus = 1.0 / math.sqrt(k) if spec.amplitude_mode == "unit-norm" else 1.0
        x[perm[:k]] = modulus * np.exp(1j * theta[:k])
        signals[k] = x
    return signals


def _decode_grid(spec, w_rows, signals, noise_base, arm=None):
    """Solve every (k, snr, m) grid point; warm-start along ascending m."""
    records = []
    kind = spec.kind
    for k in spec.k_values:
        x_true = signals[k]
        for snr_db in spec.snr_db_values:
            snr = 10.0 ** (snr_db / 10.0)
            eta = spec.eta_factor / math.sqrt(snr)
            options = SolverOptions(
                mode="constrained",
                eta_or_lambda=eta,
                max_iterations=spec.solver_max_iterations,
                tolerance=spec.solver_tolerance,
            )
            x_warm = None
            lam_warm = None
            for m in sorted(spec.m_values):
                a_mat = w_rows[:m] / math.sqrt(m)
                sigma_tilde = 0.0 if math.isinf(snr) else math.sqrt(1.0 / (m * snr))
                y = a_mat @ x_true + noise_base[:m] * sigma_tilde
                t0 = time.perf_counter()
                res = bpdn_solve(a_mat, y, options, x0=x_warm, lam0=lam_warm)
                elapsed = time.perf_counter() - t0
                x_warm, lam_warm = res.x_hat, res.lam
                coords = [("m", m), ("k", k), ("snr_db", snr_db)]
                if arm is not None:
                    coords.append(("arm", arm))
                records.append(
                    TrialRecord(
                        experiment=kind,
                        coords=tuple(coords),
                        trial=-1,  # filled by the caller
                        seed_key="",
                        mse=mse(res.x_hat, x_true),
                        iterations=res.iterations,
                        converged=res.converged,
                        elapsed=elapsed,
                    )
                )
    return records


def _mse_trial(spec: ExperimentSpec, trial: int):
    m_max = max(spec.m_values)
    gamma = _draw_gamma(spec, substream(spec.master_seed, spec.kind, "pattern", trial))
    w_rows = _sensing_rows(spec, substream(spec.master_seed, spec.kind, "matrix", trial), m_max, gamma)
    signals = _nested_signals(spec, substream(spec.master_seed, spec.kind, "signal", trial))
    noise = sample_complex_gaussian(1.0, substream(spec.master_seed, spec.kind, "noise", trial), (m_max,))
    key = stream_key(spec.master_seed, spec.kind, trial)
    return [
        replace(r, trial=trial, seed_key=key)
        for r in _decode_grid(spec, w_rows, signals, noise)
    ]


def _homog_trial(spec: ExperimentSpec, trial: int):
    m_max = max(spec.m_values)
    gamma = _draw_gamma(spec, substream(spec.master_seed, spec.kind, "pattern", trial))
    matrix_rng = substream(spec.master_seed, spec.kind, "matrix", trial)
    n = spec.n
    h = sample_complex_gaussian(1.0, matrix_rng, size=(m_max, n))
    u = matrix_rng.random((m_max, n))
    amp = 1.0 / math.sqrt(spec.p)
    phi = np.where(u < 0.5 * spec.p, amp, np.where(u < spec.p, -amp, 0.0))
    base = h * phi
    w_inhom = np.fft.fft(base * np.sqrt(gamma / np.mean(gamma))[None, :], axis=1, norm="ortho")
    w_homog = np.fft.fft(base, axis=1, norm="ortho")
    signals = _nested_signals(spec, substream(spec.master_seed, spec.kind, "signal", trial))
    noise = sample_complex_gaussian(1.0, substream(spec.master_seed, spec.kind, "noise", trial), (m_max,))
    key = stream_key(spec.master_seed, spec.kind, trial)
    records = []
    for arm, w_rows in (("homogeneous", w_homog), ("inhomogeneous", w_inhom)):
        records.extend(
            replace(r, trial=trial, seed_key=key)
            for r in _decode_grid(spec, w_rows, signals, noise, arm=arm)
        )
    return records


def _group_records(records):
    grouped = {}
    for rec in records:
        grouped.setdefault(rec.coords, []).append(rec)
    for recs in grouped.values():
        recs.sort(key=lambda r: r.trial)
    return grouped


def _mean_stderr(values):
    arr = np.array(values, dtype=float)
    mean = float(arr.mean())
    stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, stderr


def run_mse_sweep(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Mean decoder MSE on the (m, k, SNR) grid, `spec.trials` trials each."""
    if spec.kind != "mse-sweep":
        raise ParameterError(f"spec kind is {spec.kind!r}, expected 'mse-sweep'")
    batches = _run_tasks(partial(_mse_trial, spec), list(range(spec.trials)), workers)
    records = [r for batch in batches for r in batch]
    grouped = _group_records(records)
    rows = []
    for k in spec.k_values:
        for snr_db in spec.snr_db_values:
            for m in sorted(spec.m_values):
                recs = grouped[(("m", m), ("k", k), ("snr_db", snr_db))]
                mean, stderr = _mean_stderr([r.mse for r in recs])
                bad = sum(1 for r in recs if not r.converged)
                rows.append((m, k, snr_db, len(recs), mean, stderr, bad))
    total_bad = sum(1 for r in records if not r.converged)
    meta = {"nonconverged_fraction": total_bad / max(1, len(records))}
    return ExperimentResult(spec.kind, COLUMNS[spec.kind], rows, records, meta, spec)


def run_homog_vs_inhomog(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Paired homogeneous/inhomogeneous decoder MSE at equal average SNR.

    Both arms of a trial share the channel, selection, signal, and noise
    draws; only the power pattern differs.
    """
    if spec.kind != "homog-vs-inhomog":
        raise ParameterError(f"spec kind is {spec.kind!r}, expected 'homog-vs-inhomog'")
    batches = _run_tasks(partial(_homog_trial, spec), list(range(spec.trials)), workers)
    records = [r for batch in batches for r in batch]
    grouped = _group_records(records)
    rows = []
    for k in spec.k_values:
        for snr_db in spec.snr_db_values:
            for m in sorted(spec.m_values):
                point = (("m", m), ("k", k), ("snr_db", snr_db))
                rec_h = grouped[point + (("arm", "homogeneous"),)]
                rec_i = grouped[point + (("arm", "inhomogeneous"),)]
                mean_h, se_h = _mean_stderr([r.mse for r in rec_h])
                mean_i, se_i = _mean_stderr([r.mse for r in rec_i])
                bad = sum(1 for r in rec_h + rec_i if not r.converged)
                rows.append(
                    (m, k, snr_db, len(rec_h), mean_h, se_h, mean_i, se_i, mean_i - mean_h, bad)
                )
    total_bad = sum(1 for r in records if not r.converged)
    meta = {"nonconverged_fraction": total_bad / max(1, len(records))}
    return ExperimentResult(spec.kind, COLUMNS[spec.kind], rows, records, meta, spec)


# ---------------------------------------------------------------------------
# spectrum experiments (eig-cdf, tail-scaling, ld-verify)
# ---------------------------------------------------------------------------


def _eig_trial(spec: ExperimentSpec, args):
    d_idx, trial = args
    d = spec.d_values[d_idx]
    t0 = time.perf_counter()
    pattern_rng = substream(spec.master_seed, spec.kind, "pattern", d_idx, trial)
    params = TruncatedGaussianParams.from_homogeneity(mu=spec.mu, d=d)
    gamma = sample_truncated_gaussian(params, pattern_rng, size=(spec.n,))
    c = dft_gram_row(gamma)
    support_rng = substream(spec.master_seed, spec.kind, "supports", d_idx, trial)
    k_max = max(spec.k_values)
    supports = sample_supports(support_rng, spec.n, k_max, spec.num_supports, sort=False)
    key = stream_key(spec.master_seed, spec.kind, d_idx, trial)
    elapsed = time.perf_counter() - t0
    records = []
    for k in spec.k_values:
        sub_supports = np.sort(supports[:, :k], axis=1)
        diff = (sub_supports[:, None, :] - sub_supports[:, :, None]) % spec.n
        eigs = np.linalg.eigvalsh(c[diff])
        diag = float(c[0].real)  # singleton supports, exactly 1 up to rounding
        rho_max = max(float(eigs[:, -1].real.max()), diag)
        rho_min = min(float(eigs[:, 0].real.min()), diag)
        records.append(
            TrialRecord(
                experiment=spec.kind,
                coords=(("d", d), ("k", k)),
                trial=trial,
                seed_key=key,
                rho_max=rho_max,
                rho_min=rho_min,
                elapsed=elapsed,
            )
        )
    return records


def run_eig_cdf(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Per-realization sampled spectrum estimates (the empirical CDF sample).

    Supports are nested across k within a trial (a size-k support is the
    first k entries of the size-k_max draw), so the estimates are
    pointwise monotone in k by eigenvalue interlacing.
    """
    if spec.kind != "eig-cdf":
        raise ParameterError(f"spec kind is {spec.kind!r}, expected 'eig-cdf'")
    tasks = [(d_idx, trial) for d_idx in range(len(spec.d_values)) for trial in range(spec.trials)]
    batches = _run_tasks(partial(_eig_trial, spec), tasks, workers)
    records = [r for batch in batches for r in batch]
    rows = []
    medians = {}
    for d_idx, d in enumerate(spec.d_values):
        for k in spec.k_values:
            recs = [r for r in records if r.coords == (("d", d), ("k", k))]
            recs.sort(key=lambda r: r.trial)
            for r in recs:
                rows.append((d, k, r.trial, r.seed_key, r.rho_max, r.rho_min))
            medians[f"d={d},k={k}"] = {
                "rho_max": float(np.median([r.rho_max for r in recs])),
                "rho_min": float(np.median([r.rho_min for r in recs])),
            }
    return ExperimentResult(spec.kind, COLUMNS[spec.kind], rows, records, {"medians": medians}, spec)


def _rho_max_estimate(spec, n, d_idx, trial_id, k):
    """Sampled (exact for k <= 2) rho_max for one pattern realization."""
    rng = substream(spec.master_seed, spec.kind, "trial", n, d_idx, trial_id)
    d = spec.d_values[d_idx]
    if spec.power == "homogeneous":
        gamma = np.ones(n)
    else:
        params = TruncatedGaussianParams.from_homogeneity(mu=spec.mu, d=d)
        gamma = sample_truncated_gaussian(params, rng, size=(n,))
    if k == 1:
        return 1.0
    if k == 2:
        return restricted_eigs_pair_exact_dft(gamma).rho_max
    c = dft_gram_row(gamma)
    supports = sample_supports(rng, n, k, spec.num_supports)
    diff = (supports[:, None, :] - supports[:, :, None]) % n
    eigs = np.linalg.eigvalsh(c[diff])
    return max(float(eigs[:, -1].real.max()), float(c[0].real))


def _tail_point(spec: ExperimentSpec, args):
    """Adaptive exceedance count for one (n, d) grid point."""
    n_idx, d_idx = args
    n = spec.n_values[n_idx]
    threshold = 1.0 + spec.t_threshold
    t0 = time.perf_counter()
    exceed = 0
    trials = 0
    while trials < spec.max_trials:
        if exceed >= spec.target_exceedances and trials >= spec.trials:
            break
        if _rho_max_estimate(spec, n, d_idx, trials, spec.k) > threshold:
            exceed += 1
        trials += 1
    return exceed, trials, time.perf_counter() - t0


def run_tail_scaling(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Empirical P(rho_max(k, n) > 1 + t) across n for each homogeneity d.

    Each grid point adds trials until ``target_exceedances`` are seen
    (with at least ``spec.trials``) or ``max_trials`` is hit.  Rows with
    fewer than ``min_fit_exceedances`` exceedances are flagged
    low-confidence and excluded from the per-d slope fits reported in
    the metadata.
    """
    if spec.kind != "tail-scaling":
        raise ParameterError(f"spec kind is {spec.kind!r}, expected 'tail-scaling'")
    tasks = [(n_idx, d_idx) for d_idx in range(len(spec.d_values)) for n_idx in range(len(spec.n_values))]
    outcomes = _run_tasks(partial(_tail_point, spec), tasks, workers)
    rows = []
    fits = {}
    elapsed = 0.0
    for (n_idx, d_idx), (exceed, trials, dt) in zip(tasks, outcomes):
        n, d = spec.n_values[n_idx], spec.d_values[d_idx]
        p_hat = exceed / trials
        log_p = math.log(p_hat) if exceed > 0 else -math.inf
        low_conf = exceed < spec.min_fit_exceedances
        rows.append((n, d, trials, exceed, p_hat, log_p, low_conf))
        elapsed += dt
    rows.sort(key=lambda r: (r[1], r[0]))
    for d in spec.d_values:
        pts = [(r[0], r[5]) for r in rows if r[1] == d and not r[6]]
        if len(pts) >= 2:
            ns, logs = zip(*pts)
            slope, intercept = np.polyfit(np.array(ns, float), np.array(logs), 1)
            fits[str(d)] = {"slope": float(slope), "intercept": float(intercept), "points": len(pts)}
        else:
            fits[str(d)] = {"slope": None, "intercept": None, "points": len(pts)}
    base = fits.get(str(min(spec.d_values)), {}).get("slope")
    ratios = {
        str(d): (fits[str(d)]["slope"] / base if base not in (None, 0.0) and fits[str(d)]["slope"] is not None else None)
        for d in spec.d_values
    }
    meta = {"fits": fits, "slope_ratios": ratios, "point_seconds": elapsed}
    return ExperimentResult(spec.kind, COLUMNS[spec.kind], rows, [], meta, spec)


def _ld_point(spec: ExperimentSpec, args):
    n_idx, d_idx = args
    n = spec.n_values[n_idx]
    threshold = 1.0 + spec.t_threshold
    t0 = time.perf_counter()
    exceed = 0
    for trial in range(spec.trials):
        if _rho_max_estimate(spec, n, d_idx, trial, spec.k) > threshold:
            exceed += 1
    return exceed, spec.trials, time.perf_counter() - t0


def run_ld_verify(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Empirical tail of rho_max against the large-deviation bound.

    For k <= 2 the per-realization rho_max is exact (circulant closed
    form), so the tail has no support-sampling bias.  A row is
    ``consistent`` when the normalized empirical log-tail is at most
    -d^2 E(k, t)^2 + tail_slack (vacuously true at zero exceedances,
    which are flagged low-confidence).
    """
    if spec.kind != "ld-verify":
        raise ParameterError(f"spec kind is {spec.kind!r}, expected 'ld-verify'")
    tasks = [(n_idx, d_idx) for d_idx in range(len(spec.d_values)) for n_idx in range(len(spec.n_values))]
    outcomes = _run_tasks(partial(_ld_point, spec), tasks, workers)
    rows = []
    for (n_idx, d_idx), (exceed, trials, _) in zip(tasks, outcomes):
        n, d = spec.n_values[n_idx], spec.d_values[d_idx]
        p_hat = exceed / trials
        log_p_over_n = math.log(p_hat) / n if exceed > 0 else -math.inf
        exponent = -(d**2) * ld_exponent(spec.k, spec.t_threshold) ** 2
        consistent = log_p_over_n <= exponent + spec.tail_slack
        low_conf = exceed < spec.min_fit_exceedances
        rows.append(
            (n, d, spec.k, spec.t_threshold, trials, exceed, p_hat, log_p_over_n,
             exponent, consistent, low_conf)
        )
    rows.sort(key=lambda r: (r[1], r[0]))
    largest = {}
    for d in spec.d_values:
        d_rows = [r for r in rows if r[1] == d]
        largest[str(d)] = bool(d_rows[-1][9]) if d_rows else None
    meta = {"largest_n_consistent": largest}
    return ExperimentResult(spec.kind, COLUMNS[spec.kind], rows, [], meta, spec)


# ---------------------------------------------------------------------------
# theory-only experiment (delay-curve)
# ---------------------------------------------------------------------------


def run_delay_curve(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Achievable-delay rows D(epsilon) per SNR from a given spectrum."""
    if spec.kind != "delay-curve":
        raise ParameterError(f"spec kind is {spec.kind!r}, expected 'delay-curve'")
    spectrum = RestrictedSpectrum(
        k=spec.k, rho_max=spec.rho_max, rho_min=spec.rho_min,
        method="sampled", supports_examined=0,
    )
    constants = BoundConstants(c1=spec.c1, c2=spec.c2)
    rows = []
    for snr_db in spec.snr_db_values:
        snr = 10.0 ** (snr_db / 10.0)
        eps_th = mse_threshold(snr)
        for eps in spec.epsilon_values:
            query = DelayQuery(
                epsilon=eps, snr_ave=snr, spectrum=spectrum,
                k=spec.k, n=spec.n, p=spec.p, constants=constants,
            )
            delay = achievable_delay(query)
            delta_star = DELTA_CRITICAL - 1.0 / math.sqrt(eps * snr)
            beta = rip_maps(spectrum, delta_star).beta_k if math.isfinite(delay) else None
            rows.append((eps, snr_db, eps_th, delta_star, beta, delay))
    return ExperimentResult(spec.kind, COLUMNS[spec.kind], rows, [], {}, spec)


# ---------------------------------------------------------------------------
# dispatch, replay, persistence
# ---------------------------------------------------------------------------

_RUNNERS = {
    "mse-sweep": run_mse_sweep,
    "homog-vs-inhomog": run_homog_vs_inhomog,
    "eig-cdf": run_eig_cdf,
    "tail-scaling": run_tail_scaling,
    "ld-verify": run_ld_verify,
    "delay-curve": run_delay_curve,
}


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> ExperimentResult:
    if workers is None:
        workers = spec.workers
    return _RUNNERS[spec.kind](spec, workers=max(1, workers))


def replay_trial(spec: ExperimentSpec, trial: int, d: float | None = None):
    """Re-run one trial's records in isolation (decoder and CDF kinds)."""
    if spec.kind == "mse-sweep":
        return _mse_trial(spec, trial)
    if spec.kind == "homog-vs-inhomog":
        return _homog_trial(spec, trial)
    if spec.kind == "eig-cdf":
        if d is None:
            raise ParameterError("eig-cdf replay needs the d coordinate")
        return _eig_trial(spec, (list(spec.d_values).index(d), trial))
    raise ParameterError(f"replay is defined for per-trial kinds, not {spec.kind!r}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def result_csv_text(result: ExperimentResult) -> str:
    spec = result.spec
    lines = [
        f"# ehwcs-version: {__version__}",
        f"# kind: {result.kind}",
        f"# spec-hash: {spec_hash(spec)}",
        f"# master-seed: {spec.master_seed}",
        f"# columns: {','.join(result.columns)}",
        ",".join(result.columns),
    ]
    for row in result.rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_result(result: ExperimentResult, out_path) -> None:
    """Write the CSV body plus a ``<out>.json`` metadata sidecar.

    The CSV is byte-identical across reruns and worker counts; the
    sidecar additionally carries wall-clock totals and fit summaries.
    """
    out_path = str(out_path)
    with open(out_path, "w", encoding="ascii") as fh:
        fh.write(result_csv_text(result))
    sidecar = {
        "version": __version__,
        "kind": result.kind,
        "spec_hash": spec_hash(result.spec),
        "spec": asdict(result.spec),
        "columns": list(result.columns),
        "rows": len(result.rows),
        "meta": result.meta,
        "trial_seconds": sum(r.elapsed for r in result.records),
    }
    with open(out_path + ".json", "w", encoding="ascii") as fh:
        json.dump(sidecar, fh, indent=1, sort_keys=True, default=str)
