"""Exception hierarchy shared across the package."""


class BriberyError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParametersError(BriberyError, ValueError):
    """Model parameters violate one or more structural assumptions."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid model parameters: {lines}")


class DegenerateThresholdError(BriberyError, ValueError):
    """Entry threshold has a non-positive denominator: entry never profitable."""


class EmptyFeasibleSetError(BriberyError):
    """No grid menu satisfies the constraint set."""


class CalibrationError(BriberyError, ValueError):
    pass


class GenerationError(BriberyError):
    """Panel generation produced an unacceptable dataset (e.g. too much truncation)."""


class SchemaError(BriberyError, ValueError):
    """CSV or record schema mismatch."""


class DesignError(BriberyError, ValueError):
    """Design matrix cannot be built from the supplied panel."""


class RankDeficiencyError(BriberyError, ValueError):
    def __init__(self, collinear):
        self.collinear = list(collinear)
        super().__init__(
            "design matrix is rank deficient after demeaning; collinear set: "
            + ", ".join(self.collinear)
        )


class SizeLimitError(BriberyError, ValueError):
    pass


class MissingCoefficientError(BriberyError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing coefficient"


class ConfigError(BriberyError, ValueError):
    pass
