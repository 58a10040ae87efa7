"""Exception types shared across the package.

Two failure families map onto the CLI exit codes: ValidationError (bad
input, bad config, domain violations) exits 1, NumericError (integration
blowup, root-finder failure) exits 2.
"""


class ValidationError(ValueError):
    """Invalid parameters, configuration, or argument domain."""


class NumericError(RuntimeError):
    """Numerical failure: non-finite state, divergence, non-convergence."""
