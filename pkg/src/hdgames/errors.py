"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands built for different agent counts."""


class InvalidPairError(ValueError):
    """Profiles that do not differ by (at most) one unilateral deviation."""


class OrderError(ValueError):
    """An operation required one profile/path to dominate the other."""


class BudgetError(RuntimeError):
    """Exact enumeration would exceed the configured size budget."""


class NumericError(RuntimeError):
    """Non-finite values, failed convergence, or integrator instability."""


class AlignmentViolationError(RuntimeError):
    """A coupling cell went negative beyond tolerance, certifying that the
    inputs are not an aligned pair driven by a local monotone rule."""


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""
