"""Energy-harvesting wireless compressive sensing toolkit.

Simulation and analysis of sparse signal recovery over a shared
multiple-access channel with probabilistic, power-adaptive sensor
transmissions: non-isotropic mixed-Gaussian sensing ensembles, an l1
decoder, restricted extreme eigenvalues and isometry constants,
closed-form measurement/delay/tail bounds, and a seeded Monte Carlo
experiment harness.
"""

from ._version import __version__
from .ensemble import (
    ExplicitPowerModel,
    NetworkConfig,
    PowerPattern,
    SensingEnsemble,
    SparseInstance,
    StochasticPowerModel,
    build_channel_and_sw,
    build_power_pattern,
    build_sensing_ensemble,
    build_sigma,
    sample_sparse_instance,
    unitary_basis,
)
from .errors import (
    EnergyConstraintError,
    EnumerationBudgetError,
    InfeasibleRicError,
    ParameterError,
    SpecFileError,
)
from .harness import (
    ExperimentResult,
    TrialRecord,
    replay_trial,
    run_delay_curve,
    run_eig_cdf,
    run_experiment,
    run_homog_vs_inhomog,
    run_ld_verify,
    run_mse_sweep,
    run_tail_scaling,
    write_result,
)
from .recovery import (
    RecoveryResult,
    SolverOptions,
    bpdn_solve,
    l0_oracle_solve,
    mse,
    soft_threshold,
)
from .serialize import load_ensemble, load_instance, save_ensemble, save_instance
from .specfile import ExperimentSpec, parse_spec_file, parse_spec_text
from .spectra import (
    RestrictedSpectrum,
    RipParams,
    dft_gram_row,
    dft_norm_sq,
    empirical_ric,
    restricted_eigs_exact,
    restricted_eigs_pair_exact_dft,
    restricted_eigs_sampled,
    restricted_eigs_sampled_dft,
    rip_maps,
    rip_maps_inverse,
)
from .stochastic import (
    MixedGaussianParams,
    SwEntryParams,
    TruncatedGaussianParams,
    sample_complex_gaussian,
    sample_mixed_gaussian,
    sample_sw_entry,
    sample_truncated_gaussian,
    truncated_gaussian_cgf,
    truncated_gaussian_mean,
    truncated_gaussian_pdf,
)
from .streams import stream_key, substream
from .theory import (
    BoundConstants,
    DelayQuery,
    achievable_delay,
    ld_exponent,
    ld_tail_bound,
    measurement_bound,
    mse_threshold,
    mse_upper_bound,
    rip_probability,
)
