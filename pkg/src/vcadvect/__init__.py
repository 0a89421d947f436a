"""Variable-coefficient linear advection with SBP flux-reconstruction schemes."""

__version__ = "0.1.0"
