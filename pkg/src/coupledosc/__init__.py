"""Algebraic diagonalization of two coupled quantum harmonic oscillators."""
from .algebra import ModelParams, PhysicalParams, build_hamiltonian, physical_to_algebraic
from .fock import FockBasis, FockStateLabel, OperatorMatrix, build_basis

__version__ = "0.1.0"

__all__ = [
    "FockBasis",
    "FockStateLabel",
    "ModelParams",
    "OperatorMatrix",
    "PhysicalParams",
    "build_basis",
    "build_hamiltonian",
    "physical_to_algebraic",
]
