"""Command-line interface.

Subcommands::

    ehwcs simulate <spec-file> [--seed S] [--trials T] [--workers W] [--out PATH]
    ehwcs bounds   --k K --n N --p P --rho-max R --rho-min R
                   [--snr-db 25,30] [--epsilon-min E --epsilon-max E --epsilon-num N]
                   [--delta D] [--c1 C] [--c2 C] [--out PATH]
    ehwcs spectrum --n N --k K --mu MU --d D [--num-supports S | --exact]
                   [--trials R] [--seed S] [--delta D] [--out PATH]
    ehwcs verify

Exit codes: 0 success; 2 configuration error (bad spec file or flags);
3 numerical failure (a failed verify check, or a simulate run whose
non-converged solve fraction exceeds the spec's max_nonconverged).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from ._version import __version__
from .errors import ParameterError, SpecFileError
from .harness import run_experiment, write_result
from .specfile import parse_spec_file
from .spectra import (
    RestrictedSpectrum,
    restricted_eigs_exact,
    restricted_eigs_sampled_dft,
    rip_maps,
)
from .stochastic import TruncatedGaussianParams, sample_truncated_gaussian
from .streams import substream
from .theory import (
    BoundConstants,
    DelayQuery,
    achievable_delay,
    measurement_bound,
    mse_threshold,
    rip_probability,
)
from .verify import run_all

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _float_list(text):
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _emit(doc, out):
    text = json.dumps(doc, indent=1, sort_keys=True)
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_simulate(args) -> int:
    try:
        spec = parse_spec_file(args.spec_file)
        over = {}
        if args.seed is not None:
            over["master_seed"] = args.seed
        if args.trials is not None:
            over["trials"] = args.trials
        if args.workers is not None:
            over["workers"] = args.workers
        if args.out is not None:
            over["out"] = args.out
        if over:
            spec = dataclasses.replace(spec, **over).validate(path=args.spec_file)
    except (SpecFileError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = run_experiment(spec)
    out = spec.out or f"{spec.kind}.csv"
    write_result(result, out)
    bad = result.meta.get("nonconverged_fraction", 0.0)
    print(f"wrote {out} ({len(result.rows)} rows) and {out}.json")
    if bad > spec.max_nonconverged:
        print(
            f"error: non-converged solve fraction {bad:.3f} exceeds limit {spec.max_nonconverged}",
            file=sys.stderr,
        )
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_bounds(args) -> int:
    try:
        spectrum = RestrictedSpectrum(
            k=args.k, rho_max=args.rho_max, rho_min=args.rho_min,
            method="sampled", supports_examined=0,
        )
        constants = BoundConstants(c1=args.c1, c2=args.c2)
        report = {
            "inputs": {
                "n": args.n, "k": args.k, "p": args.p,
                "rho_max": args.rho_max, "rho_min": args.rho_min,
                "c1": args.c1, "c2": args.c2,
            },
            "xi_k": max(1.0 - args.rho_min, args.rho_max - 1.0),
            "snr": {},
        }
        if args.delta is not None:
            params = rip_maps(spectrum, args.delta)
            report["rip_at_delta"] = {
                "delta_k": params.delta_k,
                "beta_k": params.beta_k,
                "zeta_k": params.zeta_k,
                "vartheta_k": params.vartheta_k,
                "varsigma_k": params.varsigma_k,
                "measurement_bound": measurement_bound(
                    args.k, args.n, args.p, params.beta_k, spectrum, constants
                ),
                "rip_probability_at_bound": rip_probability(
                    measurement_bound(args.k, args.n, args.p, params.beta_k, spectrum, constants),
                    args.p, params.beta_k, constants,
                ),
            }
        epsilons = np.geomspace(args.epsilon_min, args.epsilon_max, args.epsilon_num)
        for snr_db in _float_list(args.snr_db):
            snr = 10.0 ** (snr_db / 10.0)
            curve = []
            for eps in epsilons:
                query = DelayQuery(
                    epsilon=float(eps), snr_ave=snr, spectrum=spectrum,
                    k=args.k, n=args.n, p=args.p, constants=constants,
                )
                delay = achievable_delay(query)
                curve.append({"epsilon": float(eps), "delay": "inf" if math.isinf(delay) else delay})
            report["snr"][str(snr_db)] = {
                "snr_ave": snr,
                "eps_threshold": mse_threshold(snr),
                "delay_curve": curve,
            }
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(report, args.out)
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    try:
        params = TruncatedGaussianParams.from_homogeneity(mu=args.mu, d=args.d)
        realizations = []
        for trial in range(args.trials):
            rng = substream(args.seed, "spectrum-cli", trial)
            gamma = sample_truncated_gaussian(params, rng, size=(args.n,))
            if args.exact:
                from .ensemble import PowerPattern, build_sigma, unitary_basis

                pattern = PowerPattern(gamma=gamma, p_ave=float(gamma.mean()), snr_ave=None)
                sigma = build_sigma(pattern, unitary_basis(args.n, "dft"))
                spec = restricted_eigs_exact(sigma, args.k)
            else:
                spec = restricted_eigs_sampled_dft(gamma, args.k, args.num_supports, rng)
            realizations.append(
                {"rho_max": spec.rho_max, "rho_min": spec.rho_min,
                 "supports_examined": spec.supports_examined, "method": spec.method}
            )
        report = {
            "inputs": {"n": args.n, "k": args.k, "mu": args.mu, "d": args.d,
                       "seed": args.seed, "trials": args.trials},
            "realizations": realizations,
            "median_rho_max": float(np.median([r["rho_max"] for r in realizations])),
            "median_rho_min": float(np.median([r["rho_min"] for r in realizations])),
        }
        if args.delta is not None:
            mid = RestrictedSpectrum(
                k=args.k, rho_max=report["median_rho_max"], rho_min=report["median_rho_min"],
                method="sampled", supports_examined=args.num_supports,
            )
            ripped = rip_maps(mid, args.delta)
            report["rip_at_delta"] = dataclasses.asdict(ripped)
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(report, args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    return EXIT_OK if run_all() else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ehwcs", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"ehwcs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a declarative experiment spec")
    sim.add_argument("spec_file")
    sim.add_argument("--seed", type=int, default=None, help="override master_seed")
    sim.add_argument("--trials", type=int, default=None, help="override trials")
    sim.add_argument("--workers", type=int, default=None, help="worker process count")
    sim.add_argument("--out", default=None, help="output CSV path")
    sim.set_defaults(fn=_cmd_simulate)

    bounds = sub.add_parser("bounds", help="closed-form bound report (JSON)")
    bounds.add_argument("--n", type=int, required=True)
    bounds.add_argument("--k", type=int, required=True)
    bounds.add_argument("--p", type=float, required=True)
    bounds.add_argument("--rho-max", type=float, required=True)
    bounds.add_argument("--rho-min", type=float, required=True)
    bounds.add_argument("--snr-db", default="25,30", help="comma-separated SNRs in dB")
    bounds.add_argument("--epsilon-min", type=float, default=1e-4)
    bounds.add_argument("--epsilon-max", type=float, default=1.0)
    bounds.add_argument("--epsilon-num", type=int, default=50)
    bounds.add_argument("--delta", type=float, default=None, help="also report the RIC map here")
    bounds.add_argument("--c1", type=float, default=1.0)
    bounds.add_argument("--c2", type=float, default=1.0)
    bounds.add_argument("--out", default=None)
    bounds.set_defaults(fn=_cmd_bounds)

    spectrum = sub.add_parser("spectrum", help="restricted-spectrum report (JSON)")
    spectrum.add_argument("--n", type=int, required=True)
    spectrum.add_argument("--k", type=int, required=True)
    spectrum.add_argument("--mu", type=float, default=0.2)
    spectrum.add_argument("--d", type=float, default=2.0)
    spectrum.add_argument("--num-supports", type=int, default=10_000)
    spectrum.add_argument("--exact", action="store_true", help="exact enumeration instead of sampling")
    spectrum.add_argument("--trials", type=int, default=1, help="pattern realizations")
    spectrum.add_argument("--seed", type=int, default=0)
    spectrum.add_argument("--delta", type=float, default=None)
    spectrum.add_argument("--out", default=None)
    spectrum.set_defaults(fn=_cmd_spectrum)

    ver = sub.add_parser("verify", help="run the built-in oracle suite")
    ver.set_defaults(fn=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
