"""Sub-block rearranged staircase codes: construction, decoding and analysis."""

__version__ = "0.1.0"
