"""Verification tools for phi-fixed circles and discs of self-maps on metric spaces."""

__version__ = "0.1.0"
