"""Restricted extreme eigenvalues, RIC machinery, and Fourier fast paths.

For the normalized matrix Sigma, the k-restricted extreme eigenvalues

    rho_max(k) = max  ||Sigma v||^2,   rho_min(k) = min  ||Sigma v||^2

over unit-norm v with at most k nonzeros are the extreme eigenvalues of
the k-column Gram submatrices of Sigma* Sigma.  Both extremes are
attained at supports of size exactly k: by Cauchy interlacing, adding a
column can only raise the largest and lower the smallest eigenvalue, so
enumeration is restricted to size-k supports (property-tested against
full enumeration over all sizes <= k).

With the Fourier basis the Gram matrix is circulant,
G[a, b] = c[(b - a) mod n] with c = FFT(gamma) / (n * P_ave), which
gives O(n log n) spectrum estimation without ever forming Sigma, an
exact closed form for k = 2 (1 +/- max_d |c_d|), and the closed-form
squared norm of Sigma v expanded in pairwise phase sums.

For flat-modulus bases (|Psi_ij|^2 = 1/n, e.g. DFT) every Gram diagonal
entry is 1, hence trace(G_T) = k and the classic bounds
1 <= rho_max(k) <= k, 0 <= rho_min(k) <= 1 hold; for other bases the
diagonal varies with the power pattern and the bounds need not hold.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationBudgetError, InfeasibleRicError, ParameterError

__all__ = [
    "RestrictedSpectrum",
    "RipParams",
    "gram_matrix",
    "restricted_eigs_exact",
    "restricted_eigs_sampled",
    "dft_gram_row",
    "restricted_eigs_sampled_dft",
    "restricted_eigs_pair_exact_dft",
    "dft_norm_sq",
    "rip_maps",
    "rip_maps_inverse",
    "empirical_ric",
    "sample_supports",
    "mean_cosine_phases",
]

MAX_SUPPORT_SIZE = 64
DEFAULT_ENUM_BUDGET = 2_000_000
SUPPORT_CHUNK = 1024


@dataclass(frozen=True)
class RestrictedSpectrum:
    """Extreme k-restricted eigenvalues with estimation metadata.

    method "exact-enumeration" means every size-k support was examined.
    method "sampled" means a uniform subset of supports was examined, so
    rho_max is a lower bound on the true maximum and rho_min an upper
    bound on the true minimum.
    """

    k: int
    rho_max: float
    rho_min: float
    method: str
    supports_examined: int

    @property
    def ratio(self) -> float:
        """Restricted condition number rho_max / rho_min."""
        return self.rho_max / self.rho_min if self.rho_min > 0.0 else math.inf


@dataclass(frozen=True)
class RipParams:
    """The RIC delta_k together with its modified form beta_k.

    beta_k absorbs the spread of the restricted spectrum: it is the
    largest beta such that a (1 +/- beta)-isometry on the images of
    sparse vectors implies a (1 +/- delta_k)-isometry on the vectors
    themselves, i.e. the pointwise minimum of the two linear constraints
    beta <= 1 - (1-delta)/rho_min and beta <= (1+delta)/rho_max - 1.
    ``assumption_warning`` is set when rho_max > 2, outside the range the
    piecewise map was derived for (values still evaluate).
    """

    xi_k: float
    zeta_k: float
    vartheta_k: float
    varsigma_k: float
    delta_k: float
    beta_k: float
    assumption_warning: str | None = None


def gram_matrix(sigma_mat: np.ndarray) -> np.ndarray:
    return sigma_mat.conj().T @ sigma_mat


def _support_extremes(gram: np.ndarray, supports: np.ndarray):
    """Batched (lambda_min, lambda_max) of gram submatrices for each support row."""
    sub = gram[supports[:, :, None], supports[:, None, :]]
    eigs = np.linalg.eigvalsh(sub)
    return eigs[:, 0].real, eigs[:, -1].real


def _check_k(n: int, k: int):
    if not 1 <= k <= min(n, MAX_SUPPORT_SIZE):
        raise ParameterError(f"support size must satisfy 1 <= k <= min(n, {MAX_SUPPORT_SIZE}), got {k}")


def _extremes_over_support_iter(gram, k, support_iter, total):
    rho_max = -math.inf
    rho_min = math.inf
    chunk_rows = max(1, int(4_000_000 / max(1, 16 * k * k)))
    it = iter(support_iter)
    examined = 0
    while True:
        block = np.array(list(itertools.islice(it, chunk_rows)), dtype=np.intp)
        if block.size == 0:
            break
        lo, hi = _support_extremes(gram, block)
        rho_max = max(rho_max, float(hi.max()))
        rho_min = min(rho_min, float(lo.min()))
        examined += block.shape[0]
    assert examined == total
    return rho_max, rho_min


def restricted_eigs_exact(
    sigma_mat: np.ndarray, k: int, budget: int = DEFAULT_ENUM_BUDGET
) -> RestrictedSpectrum:
    """Exact rho_max(k), rho_min(k) by enumerating all size-k supports.

    Raises EnumerationBudgetError when C(n, k) exceeds ``budget``; use
    `restricted_eigs_sampled` then.  The stated extremes over supports of
    size <= k are attained at size exactly k (interlacing), so only those
    are enumerated.
    """
    n = sigma_mat.shape[1]
    _check_k(n, k)
    count = math.comb(n, k)
    if count > budget:
        raise EnumerationBudgetError(
            f"C({n},{k}) = {count} supports exceeds budget {budget}; "
            "use restricted_eigs_sampled instead"
        )
    gram = gram_matrix(sigma_mat)
    rho_max, rho_min = _extremes_over_support_iter(
        gram, k, itertools.combinations(range(n), k), count
    )
    return RestrictedSpectrum(
        k=k, rho_max=rho_max, rho_min=rho_min, method="exact-enumeration", supports_examined=count
    )


def sample_supports(
    rng: np.random.Generator, n: int, k: int, num: int, sort: bool = True
) -> np.ndarray:
    """num uniform size-k subsets of range(n), rows sorted by default.

    Draws happen in fixed chunks of SUPPORT_CHUNK rows (the final chunk
    is drawn in full and truncated), so on the same stream a shorter run
    is a prefix of a longer one -- sampled spectrum estimates are then
    monotone in ``num`` under nested sampling.  With ``sort=False`` rows
    keep their draw order, so the first j columns of each row are a
    uniform size-j subset (nested supports across sparsity levels).
    """
    _check_k(n, k)
    if num < 1:
        raise ParameterError(f"need at least one support, got num={num}")
    chunks = []
    produced = 0
    while produced < num:
        block = rng.integers(0, n, size=(SUPPORT_CHUNK, k))
        if k > 1:
            while True:
                srt = np.sort(block, axis=1)
                bad = np.nonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1))[0]
                if bad.size == 0:
                    break
                block[bad] = rng.integers(0, n, size=(bad.size, k))
        chunks.append(np.sort(block, axis=1) if sort else block)
        produced += SUPPORT_CHUNK
    return np.concatenate(chunks, axis=0)[:num].astype(np.intp)


def _sampled_spectrum(gram_diag, extremes_fn, n, k, num_supports, rng, include_singletons):
    supports = sample_supports(rng, n, k, num_supports)
    lo, hi = extremes_fn(supports)
    rho_max = float(hi.max())
    rho_min = float(lo.min())
    examined = num_supports
    if include_singletons:
        diag = np.real(gram_diag)
        rho_max = max(rho_max, float(diag.max()))
        rho_min = min(rho_min, float(diag.min()))
        examined += n
    return rho_max, rho_min, examined


def restricted_eigs_sampled(
    sigma_mat: np.ndarray,
    k: int,
    num_supports: int,
    rng: np.random.Generator,
    include_singletons: bool = True,
) -> RestrictedSpectrum:
    """Sampled spectrum estimate: extremes over uniformly drawn supports.

    The returned rho_max is a lower bound on the true rho_max and
    rho_min an upper bound on the true rho_min.  With
    ``include_singletons`` all n single-column supports are also
    examined (cheap: the Gram diagonal), which for flat-modulus bases
    pins rho_max >= 1 >= rho_min.
    """
    n = sigma_mat.shape[1]
    gram = gram_matrix(sigma_mat)
    rho_max, rho_min, examined = _sampled_spectrum(
        np.diag(gram), lambda s: _support_extremes(gram, s), n, k, num_supports, rng,
        include_singletons,
    )
    return RestrictedSpectrum(
        k=k, rho_max=rho_max, rho_min=rho_min, method="sampled", supports_examined=examined
    )


def dft_gram_row(gamma: np.ndarray) -> np.ndarray:
    """Generator row c of the circulant Gram matrix under the Fourier basis.

    G[a, b] = c[(b - a) mod n] with c = FFT(gamma) / (n * P_ave); c[0] is
    exactly 1 up to rounding.  O(n log n), never forms Sigma.
    """
    gamma = np.asarray(gamma, dtype=float)
    total = gamma.sum()
    if total <= 0.0:
        raise ParameterError("average receive power is zero; Gram row undefined")
    return np.fft.fft(gamma) / total


def _dft_support_extremes(c: np.ndarray, supports: np.ndarray):
    n = c.shape[0]
    diff = (supports[:, None, :] - supports[:, :, None]) % n
    sub = c[diff]
    eigs = np.linalg.eigvalsh(sub)
    return eigs[:, 0].real, eigs[:, -1].real


def restricted_eigs_sampled_dft(
    gamma: np.ndarray,
    k: int,
    num_supports: int,
    rng: np.random.Generator,
    include_singletons: bool = True,
) -> RestrictedSpectrum:
    """Sampled spectrum for the Fourier basis directly from the power pattern.

    Same estimator contract as `restricted_eigs_sampled` but O(n log n +
    num_supports * k^3) via the circulant Gram row; the workhorse for
    large-n spectrum experiments.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = gamma.shape[0]
    c = dft_gram_row(gamma)
    rho_max, rho_min, examined = _sampled_spectrum(
        np.full(n, c[0].real), lambda s: _dft_support_extremes(c, s), n, k, num_supports, rng,
        include_singletons,
    )
    return RestrictedSpectrum(
        k=k, rho_max=rho_max, rho_min=rho_min, method="sampled", supports_examined=examined
    )


def restricted_eigs_pair_exact_dft(gamma: np.ndarray) -> RestrictedSpectrum:
    """Exact rho_max(2), rho_min(2) for the Fourier basis in O(n log n).

    Every 2-column Gram submatrix is [[1, conj(c_d)], [c_d, 1]] for the
    index difference d, with eigenvalues 1 +/- |c_d|; the extremes over
    supports are 1 +/- max_d |c_d|.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = gamma.shape[0]
    if n < 4:
        raise ParameterError("pair spectrum needs n >= 4")
    c = dft_gram_row(gamma)
    peak = float(np.abs(c[1:]).max())
    return RestrictedSpectrum(
        k=2,
        rho_max=1.0 + peak,
        rho_min=1.0 - peak,
        method="exact-enumeration",
        supports_examined=math.comb(n, 2),
    )


def dft_norm_sq(gamma: np.ndarray, v: np.ndarray, basis: str = "dft") -> float:
    """||Sigma v||^2 for sparse v under the Fourier basis, without forming Sigma.

    Expands the squared norm into ||v||^2 plus pairwise cross terms
    2 Re{ v_q conj(v_l) * sum_i gamma_i e^{-2 pi j i (s_q - s_l)/n} } /
    (n P_ave), evaluated directly in O(n k^2).  Only valid for the
    Fourier basis (negative-exponent unitary convention).
    """
    if basis != "dft":
        raise ParameterError(f"closed-form norm expansion requires the dft basis, got {basis!r}")
    gamma = np.asarray(gamma, dtype=float)
    v = np.asarray(v)
    n = gamma.shape[0]
    if v.shape != (n,):
        raise ParameterError(f"v must have length {n}, got {v.shape}")
    support = np.nonzero(v)[0]
    vals = v[support]
    total = gamma.sum()
    if total <= 0.0:
        raise ParameterError("average receive power is zero")
    out = float(np.vdot(vals, vals).real)
    idx = np.arange(n)
    for a in range(1, support.size):
        for b in range(a):
            delta = support[a] - support[b]
            phase_sum = np.dot(gamma, np.exp((-2j * math.pi * delta / n) * idx))
            out += 2.0 * (vals[a] * np.conj(vals[b]) * phase_sum).real / total
    return out


def rip_maps(spectrum: RestrictedSpectrum, delta_k: float) -> RipParams:
    """Map a target RIC delta_k to the modified RIC beta_k and its companions.

    xi measures the spread of the restricted spectrum around 1 and is
    the infeasibility floor: delta_k must lie in (xi, 1).  The map is
    piecewise linear with knee at vartheta; each branch inverts exactly
    (see `rip_maps_inverse`).
    """
    rho_max, rho_min = spectrum.rho_max, spectrum.rho_min
    if rho_min <= 0.0:
        raise InfeasibleRicError(f"rho_min = {rho_min} <= 0: restricted spectrum degenerate")
    xi = max(1.0 - rho_min, rho_max - 1.0)
    if not xi < delta_k < 1.0:
        raise InfeasibleRicError(
            f"target RIC delta_k = {delta_k} outside the feasible range (xi, 1) = ({xi}, 1)"
        )
    spread = rho_max - rho_min
    zeta = max(0.0, (2.0 - rho_max - rho_min) / spread) if spread > 0.0 else 0.0
    vartheta = (1.0 + zeta) * rho_max - 1.0
    varsigma = 2.0 / rho_max - 1.0
    if delta_k < vartheta:
        beta = 1.0 - (1.0 - delta_k) / rho_min
    else:
        beta = (1.0 + delta_k) / rho_max - 1.0
    warning = None
    if rho_max > 2.0:
        warning = f"rho_max = {rho_max} > 2: outside the range assumed by the piecewise RIC map"
    return RipParams(
        xi_k=xi, zeta_k=zeta, vartheta_k=vartheta, varsigma_k=varsigma,
        delta_k=delta_k, beta_k=beta, assumption_warning=warning,
    )


def rip_maps_inverse(spectrum: RestrictedSpectrum, beta_k: float) -> float:
    """Inverse of the piecewise map: the RIC delta_k certified by beta_k.

    Equals the pointwise maximum of 1 - (1-beta) rho_min and
    (1+beta) rho_max - 1, branch-selected at zeta.
    """
    rho_max, rho_min = spectrum.rho_max, spectrum.rho_min
    spread = rho_max - rho_min
    zeta = max(0.0, (2.0 - rho_max - rho_min) / spread) if spread > 0.0 else 0.0
    varsigma = 2.0 / rho_max - 1.0
    if not 0.0 < beta_k < max(varsigma, zeta) + 1e-15:
        raise InfeasibleRicError(f"beta_k = {beta_k} outside (0, max(zeta, varsigma)]")
    if beta_k < zeta:
        return 1.0 - (1.0 - beta_k) * rho_min
    return (1.0 + beta_k) * rho_max - 1.0


def empirical_ric(a_mat: np.ndarray, k: int, num_trials: int, rng: np.random.Generator) -> float:
    """Sampled lower bound on the order-k RIC of a_mat.

    Draws ``num_trials`` uniform supports; on each, evaluates both a
    uniform random unit vector on the complex sphere and the exact
    per-support extremes of the Gram submatrix of A* A (the latter
    dominates, being the worst vector on that support).  The true RIC is
    the max over all supports, so the estimate can only be low.
    """
    if num_trials < 1:
        raise ParameterError(f"need at least one trial, got {num_trials}")
    n = a_mat.shape[1]
    _check_k(n, k)
    gram = gram_matrix(a_mat)
    supports = sample_supports(rng, n, k, num_trials)
    lo, hi = _support_extremes(gram, supports)
    worst = max(float((hi - 1.0).max()), float((1.0 - lo).max()))
    vecs = rng.standard_normal((num_trials, k)) + 1j * rng.standard_normal((num_trials, k))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    sub = gram[supports[:, :, None], supports[:, None, :]]
    quad = np.einsum("ti,tij,tj->t", vecs.conj(), sub, vecs).real
    worst = max(worst, float(np.abs(quad - 1.0).max()))
    return worst


def mean_cosine_phases(n: int, delta: int, theta: float) -> float:
    """Average of cos(theta + 2 pi i delta / n) over i = 0..n-1.

    Zero exactly for any integer delta not divisible by n (sum of n-th
    roots of unity); used to sanity-check the Fourier phase convention.
    """
    i = np.arange(n)
    return float(np.mean(np.cos(theta + 2.0 * math.pi * i * delta / n)))
