"""Exact-arithmetic constructions and checks for Lie and Lie-Yamaguti algebras."""

__version__ = "0.1.0"
