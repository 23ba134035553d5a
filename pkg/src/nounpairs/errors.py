"""Exception hierarchy shared by all pipeline stages.

Concrete errors live next to the code that raises them; everything derives
from one of the two bases below so the CLI can map failures to exit codes
(1 = validation, 2 = data).
"""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PipelineError):
    """Bad arguments, bad configuration, or preconditions not met."""


class DataError(PipelineError):
    """Malformed or inconsistent input data."""
