"""Exact-arithmetic geometry of arbitrage-free one-period markets."""

from arbcone.rational import format_rational, parse_rational

__version__ = "0.1.0"

__all__ = ["format_rational", "parse_rational", "__version__"]
