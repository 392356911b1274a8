"""Exception types shared across the package.

The CLI maps these onto process exit codes: validation problems exit
with 1, integrator failures with 2 and result-extraction failures
with 3.
"""


class ValidationError(ValueError):
    """Raised for parameters or inputs outside the supported domain."""


class CompilationError(RuntimeError):
    """Raised when a compiled pulse program fails its own self-check."""


class IntegrationError(RuntimeError):
    """Raised when the time integration breaks an accuracy guarantee."""


class ExtractionError(RuntimeError):
    """Raised when no period or factor can be read off a distribution."""
