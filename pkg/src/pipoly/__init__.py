"""Exact prime counting and polynomial inequalities in pi(x)."""

__version__ = "0.1.0"
