"""Shared error type for invalid data, parameters, and files."""


class DataError(ValueError):
    """Invalid sequences, samples, parameters, or input files.

    The CLI maps this (and I/O failures) to exit code 2, keeping it
    distinct from usage errors (exit 1).
    """
