"""Partial group cohomology over exact fields, with globalization certificates."""

__version__ = "0.1.0"
