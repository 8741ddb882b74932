"""Verification and fault localisation of Python programs through transpiled C."""

__version__ = "0.1.0"
