"""Exception types shared across the toolkit."""


class ParameterError(ValueError):
    """A distribution or model parameter is outside its valid range."""


class EnergyConstraintError(ParameterError):
    """Transmit energy p*b_j exceeds the per-slot energy budget E_j."""


class EnumerationBudgetError(RuntimeError):
    """Exact support enumeration would exceed the configured budget.

    Callers should fall back to the sampled spectrum estimator.
    """


class InfeasibleRicError(ValueError):
    """Requested RIC is not achievable for the given restricted spectrum."""


class SpecFileError(ValueError):
    """An experiment spec file failed to parse or validate.

    Carries ``path`` and ``line`` (1-based, 0 when the error is not tied
    to a specific line) so messages are grep-able as ``path:line: msg``.
    """

    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")
