"""Stabilizer simulation of stochastic dephasing-only circuits.

Mixed stabilizer states under recorded-location Pauli dephasing, exact
Renyi-2 / Type-I correlators, a dense density-matrix oracle, a union-find
bond-percolation oracle, and finite-size-scaling analysis of the
strong-to-weak symmetry-breaking transition.
"""

__version__ = "0.1.0"

from .models import ModelInstance, build, thooft_string
from .observables import chi2, corr_profile, renyi2_correlator, type1_correlator
from .pauli import PauliString, mul, symplectic_product
from .stabilizer import StabilizerMixedState
from .trajectory import run_ensemble, run_trajectory

__all__ = [
    "__version__",
    "PauliString",
    "StabilizerMixedState",
    "ModelInstance",
    "build",
    "thooft_string",
    "chi2",
    "corr_profile",
    "renyi2_correlator",
    "type1_correlator",
    "run_trajectory",
    "run_ensemble",
    "mul",
    "symplectic_product",
]
