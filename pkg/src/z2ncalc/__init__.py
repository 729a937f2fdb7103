"""Exact symbolic engine for Z2^n-graded (colored super) calculus."""

__version__ = "0.1.0"
