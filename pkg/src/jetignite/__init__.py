"""Minimal and extremal solutions of the advective Gelfand problem for jets."""

__version__ = "0.1.0"
