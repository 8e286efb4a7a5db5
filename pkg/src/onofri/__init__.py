"""Numerical experiments around the sharp constrained Moser-Trudinger-Onofri
inequality on the two-sphere, its one-dimensional axisymmetric form, and the
planar Liouville-type equation the stereographic projection turns it into."""

__version__ = "0.1.0"

from . import axisym, conformal, eigen, functional, planar, shooting, sphere  # noqa: F401,E402
