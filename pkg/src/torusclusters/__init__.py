"""Cluster formation in weakly interacting kinetic Langevin systems.

Two complementary toolchains share this package: an N-particle Langevin
simulation engine on the periodic torus (splitting integrators, observables,
density-based cluster detection) and a spectral analysis of the linearized
kinetic mean-field equation (stability operator, critical temperature,
fluctuation growth).  The two predict the same phenomena and are meant to be
cross-validated against each other.
"""

from .potentials import GEM, Gaussian, Morse, WrappedGaussian

__version__ = "0.1.0"

__all__ = ["Gaussian", "Morse", "GEM", "WrappedGaussian", "__version__"]
