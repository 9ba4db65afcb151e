"""Earliest-arrival public transit routing with buffer times and unrestricted walking."""
from .model import UNREACHABLE, Network, format_clock, parse_time

__version__ = "0.1.0"

__all__ = ["UNREACHABLE", "Network", "format_clock", "parse_time", "__version__"]
