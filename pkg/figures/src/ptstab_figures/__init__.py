"""Batch renderer turning ptstab sweep/boundary/threshold files into figures."""

__version__ = "0.1.0"
