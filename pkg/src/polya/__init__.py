"""Certified bounds on the Polya functional for triangles, rhombi and slabs."""

__version__ = "0.1.0"
