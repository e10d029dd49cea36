"""Solver and verification harness for evolution equations with a variable-exponent memory kernel."""

__version__ = "1.0.0"
