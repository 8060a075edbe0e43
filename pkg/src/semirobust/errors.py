"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI maps it to.
"""


class SemirobustError(Exception):
    exit_code = 1


class ConfigError(SemirobustError, ValueError):
    """Invalid configuration or contract violation detected before compute."""

    exit_code = 2


class NumericError(SemirobustError, ArithmeticError):
    """A numerical routine could not produce a defined result."""

    exit_code = 3


class DatasetError(SemirobustError, ValueError):
    """Malformed or out-of-domain input data."""

    exit_code = 4


class DegenerateSignatureError(NumericError):
    """All embedded points coincide, so no pairwise swap can ever occur."""

    def __init__(self, message, tied_pairs=()):
        super().__init__(message)
        self.tied_pairs = list(tied_pairs)
