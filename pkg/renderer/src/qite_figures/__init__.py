"""Figures from qite-pde run artifacts (trajectory and snapshot CSVs)."""

from .render import FigureKind, FigureSpec, SchemaError, render

__version__ = "0.1.0"
