"""Valuation-conditioned, complexity-informed return analysis for daily index data."""

__version__ = "0.1.0"
