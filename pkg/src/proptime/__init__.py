"""Entangled two-level clocks as a detector of proper-time differences."""

__version__ = "0.1.0"
