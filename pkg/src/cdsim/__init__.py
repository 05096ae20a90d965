"""Turing machines compiled to smooth disk maps, with exact certification tools."""

__version__ = "0.1.0"
