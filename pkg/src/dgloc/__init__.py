"""Exact computations with free dg categories, cylinders, killing and localization."""

__version__ = "0.1.0"
