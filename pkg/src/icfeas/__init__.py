"""Rate-1/3 feasibility analysis for groupcast index coding problems."""

__version__ = "0.1.0"
