"""Exact and numeric verification of the transverse index structures of
Riemann-surface foliations: the complex Connes-Moscovici Hopf algebra, its
cyclic cohomology, Gelfand-Fuchs cohomology, the characteristic maps and the
cyclic cocycles of surface crossed products."""

__version__ = "0.1.0"
