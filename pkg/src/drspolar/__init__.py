"""Damek-Ricci spaces from Clifford modules, with exact polarity checks."""

__version__ = "0.1.0"
