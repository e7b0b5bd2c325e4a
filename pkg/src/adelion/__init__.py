"""Exact harmonic analysis on p-adic fields and adeles."""

__version__ = "0.1.0"
