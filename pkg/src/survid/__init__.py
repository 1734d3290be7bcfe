"""Formal models of surveillance and identity over finite systems."""

__version__ = "0.1.0"
