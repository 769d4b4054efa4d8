"""Declarative experiment spec files.

Format: one ``key = value`` per line, ``#`` comments, blank lines
ignored.  Values are integers, floats, bare or quoted strings, or
flat numeric arrays ``[a, b, c]``.  Keys map one-to-one onto
`ExperimentSpec` fields; unknown keys, type mismatches, and missing
requirements fail with ``path:line:`` prefixed errors so specs are
diff-able and debuggable.

Example::

    # sweep decoder error against measurement count
    kind = mse-sweep
    master_seed = 20260801
    n = 500
    p = 0.8
    mu = 0.2
    d = 2.0
    k_values = [5, 10]
    snr_db_values = [25, 30]
    m_values = [20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120, 130, 140, 150]
    trials = 200

Key reference (per experiment kind):

* all kinds: ``kind``, ``master_seed``; optional ``trials``, ``out``,
  ``workers``, ``basis``, ``amplitude_mode``.
* mse-sweep / homog-vs-inhomog: ``n``, ``p``, ``mu``, ``d``,
  ``m_values``, ``k_values``, ``snr_db_values``, ``trials``; optional
  ``eta_factor``, ``solver_tolerance``, ``solver_max_iterations``,
  ``max_nonconverged``.
* eig-cdf: ``n``, ``mu``, ``d_values``, ``k_values``, ``num_supports``,
  ``trials``.
* tail-scaling: ``n_values``, ``d_values``, ``mu``, ``k``,
  ``t_threshold``, ``num_supports``, ``trials`` (minimum per grid
  point); optional ``target_exceedances``, ``max_trials``,
  ``min_fit_exceedances``, ``power``.
* ld-verify: ``n_values``, ``d_values``, ``mu``, ``k``,
  ``t_threshold``, ``trials``; optional ``num_supports``,
  ``tail_slack``, ``power``.
* delay-curve: ``n``, ``k``, ``p``, ``rho_max``, ``rho_min``,
  ``epsilon_values``, ``snr_db_values``; optional ``c1``, ``c2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields

from .errors import SpecFileError

__all__ = ["ExperimentSpec", "parse_spec_file", "parse_spec_text"]

EXPERIMENT_KINDS = (
    "mse-sweep",
    "homog-vs-inhomog",
    "eig-cdf",
    "tail-scaling",
    "delay-curve",
    "ld-verify",
)

_INT_RE = re.compile(r"^[+-]?\d+$")
_BARE_RE = re.compile(r"^[A-Za-z0-9_.+\-/]+$")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to run one experiment, seed included."""

    kind: str
    master_seed: int
    trials: int = 200
    # scenario
    n: int = 500
    p: float = 0.8
    mu: float = 0.2
    d: float = 2.0
    basis: str = "dft"
    amplitude_mode: str = "unit-norm"
    power: str = "stochastic"
    # sweep grids
    k_values: tuple = ()
    m_values: tuple = ()
    snr_db_values: tuple = ()
    d_values: tuple = ()
    n_values: tuple = ()
    epsilon_values: tuple = ()
    # single-valued sweep parameters
    k: int = 5
    t_threshold: float = 0.04
    num_supports: int = 4000
    rho_max: float = 1.0
    rho_min: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    # solver knobs
    eta_factor: float = 1.1
    solver_tolerance: float = 1e-5
    solver_max_iterations: int = 4000
    max_nonconverged: float = 0.1
    # adaptive tail sampling
    target_exceedances: int = 50
    max_trials: int = 100_000
    min_fit_exceedances: int = 10
    tail_slack: float = 0.02
    # io
    out: str | None = None
    workers: int = 1

    def validate(self, path="<spec>", lines=None):
        """Cross-field checks; raises SpecFileError pointing at lines when known."""
        lines = lines or {}

        def fail(key, msg):
            raise SpecFileError(path, lines.get(key, 0), msg)

        if self.kind not in EXPERIMENT_KINDS:
            fail("kind", f"unknown kind {self.kind!r}, expected one of {EXPERIMENT_KINDS}")
        if self.trials < 1:
            fail("trials", f"trials must be >= 1, got {self.trials}")
        required = {
            "mse-sweep": ("m_values", "k_values", "snr_db_values"),
            "homog-vs-inhomog": ("m_values", "k_values", "snr_db_values"),
            "eig-cdf": ("d_values", "k_values"),
            "tail-scaling": ("n_values", "d_values"),
            "ld-verify": ("n_values", "d_values"),
            "delay-curve": ("epsilon_values", "snr_db_values"),
        }[self.kind]
        for key in required:
            if len(getattr(self, key)) == 0:
                fail(key, f"{self.kind} requires a non-empty {key}")
        for key in ("k_values", "m_values", "n_values"):
            if any(v < 1 for v in getattr(self, key)):
                fail(key, f"{key} entries must be >= 1")
        if not 0.0 < self.p <= 1.0:
            fail("p", f"p must be in (0, 1], got {self.p}")
        if self.power not in ("stochastic", "homogeneous"):
            fail("power", f"power must be 'stochastic' or 'homogeneous', got {self.power!r}")
        if self.power == "stochastic" and (self.mu <= 0 or self.d <= 0):
            fail("mu", f"stochastic patterns need mu > 0 and d > 0, got mu={self.mu}, d={self.d}")
        if self.kind in ("tail-scaling", "ld-verify") and self.t_threshold <= 0:
            fail("t_threshold", f"t_threshold must be > 0, got {self.t_threshold}")
        if self.kind == "delay-curve":
            if not self.rho_min <= self.rho_max:
                fail("rho_max", f"need rho_min <= rho_max, got {self.rho_min} > {self.rho_max}")
            if any(e <= 0 for e in self.epsilon_values):
                fail("epsilon_values", "epsilon values must be > 0")
        if self.num_supports < 1:
            fail("num_supports", f"num_supports must be >= 1, got {self.num_supports}")
        if self.workers < 0:
            fail("workers", f"workers must be >= 0, got {self.workers}")
        return self


_INT_FIELDS = {
    "master_seed", "trials", "n", "k", "num_supports", "solver_max_iterations",
    "target_exceedances", "max_trials", "min_fit_exceedances", "workers",
}
_FLOAT_FIELDS = {
    "p", "mu", "d", "t_threshold", "rho_max", "rho_min", "c1", "c2", "eta_factor",
    "solver_tolerance", "max_nonconverged", "tail_slack",
}
_STR_FIELDS = {"kind", "basis", "amplitude_mode", "power", "out"}
_INT_ARRAY_FIELDS = {"k_values", "m_values", "n_values"}
_FLOAT_ARRAY_FIELDS = {"snr_db_values", "d_values", "epsilon_values"}
_ALL_KEYS = (
    _INT_FIELDS | _FLOAT_FIELDS | _STR_FIELDS | _INT_ARRAY_FIELDS | _FLOAT_ARRAY_FIELDS
)
assert _ALL_KEYS == {f.name for f in fields(ExperimentSpec)}


def _parse_scalar(token, path, lineno):
    token = token.strip()
    if not token:
        raise SpecFileError(path, lineno, "empty value")
    if _INT_RE.match(token):
        return int(token)
    try:
        return float(token)
    except ValueError:
        pass
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    if _BARE_RE.match(token):
        return token
    raise SpecFileError(path, lineno, f"cannot parse value {token!r}")


def _parse_value(raw, path, lineno):
    raw = raw.strip()
    if raw.startswith("["):
        if not raw.endswith("]"):
            raise SpecFileError(path, lineno, "unterminated array (expected closing ']')")
        inner = raw[1:-1].strip()
        if not inner:
            return []
        items = [_parse_scalar(tok, path, lineno) for tok in inner.split(",")]
        if not all(isinstance(v, (int, float)) for v in items):
            raise SpecFileError(path, lineno, "arrays may contain numbers only")
        return items
    return _parse_scalar(raw, path, lineno)


def _coerce(key, value, path, lineno):
    def expect(cond, what):
        if not cond:
            raise SpecFileError(path, lineno, f"key {key!r} expects {what}, got {value!r}")

    if key in _INT_FIELDS:
        expect(isinstance(value, int), "an integer")
        return value
    if key in _FLOAT_FIELDS:
        expect(isinstance(value, (int, float)), "a number")
        return float(value)
    if key in _STR_FIELDS:
        expect(isinstance(value, str), "a string")
        return value
    if key in _INT_ARRAY_FIELDS:
        expect(isinstance(value, list) and all(isinstance(v, int) for v in value),
               "an array of integers")
        return tuple(value)
    if key in _FLOAT_ARRAY_FIELDS:
        expect(isinstance(value, list), "an array of numbers")
        return tuple(float(v) for v in value)
    raise SpecFileError(path, lineno, f"unknown key {key!r}")


def parse_spec_text(text: str, path: str = "<spec>") -> ExperimentSpec:
    """Parse spec-file text into a validated ExperimentSpec."""
    values = {}
    lines = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecFileError(path, lineno, f"expected 'key = value', got {raw_line.strip()!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        if key not in _ALL_KEYS:
            raise SpecFileError(path, lineno, f"unknown key {key!r}")
        if key in values:
            raise SpecFileError(path, lineno, f"duplicate key {key!r} (first at line {lines[key]})")
        values[key] = _coerce(key, _parse_value(raw_value, path, lineno), path, lineno)
        lines[key] = lineno
    if "kind" not in values:
        raise SpecFileError(path, 0, "missing required key 'kind'")
    if "master_seed" not in values:
        raise SpecFileError(path, 0, "missing required key 'master_seed'")
    spec = ExperimentSpec(**values)
    return spec.validate(path=path, lines=lines)


def parse_spec_file(path) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec_text(fh.read(), path=str(path))
