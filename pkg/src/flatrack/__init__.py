"""Discretizations of the Teichmueller geodesic flow on translation surfaces."""

__version__ = "0.1.0"
