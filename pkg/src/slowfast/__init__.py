"""Symbolic-numeric analysis of polynomial slow-fast systems at infinity."""

from .poly import Polynomial, WeightVector, canonical_string, decompose
from .parse import ParseError, SpecError, parse_polynomial, parse_system
from .system import SlowFastSystem
from .compactify import ChartField, ChartId, all_charts, compactify_chart, structure_report

__all__ = [
    "Polynomial", "WeightVector", "canonical_string", "decompose",
    "ParseError", "SpecError", "parse_polynomial", "parse_system",
    "SlowFastSystem", "ChartField", "ChartId", "all_charts", "compactify_chart",
    "structure_report",
]
