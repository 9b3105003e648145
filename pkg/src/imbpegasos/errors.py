"""Exception types; the CLI maps them to exit codes 2 and 3."""


class InputError(ValueError):
    """Malformed input or invalid parameter: missing column, bad cell, T < 1, ..."""


class DegenerateDataError(ValueError):
    """Well-formed input that the method cannot use, e.g. a class with no rows."""
