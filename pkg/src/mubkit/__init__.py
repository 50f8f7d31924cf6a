"""Finite rings and fields, mutually unbiased bases, generalized Pauli
operators, Bell states and state tomography on C^N."""

from .bases import Basis, computational_basis, dual_basis, family_basis, mub_family, unbiasedness
from .galois import FiniteStructure, build_structure, galois_field, ring_mod_n, verify_axioms
from .tomography import DensityMatrix, measure, reconstruct
from .weylgroup import enumerate_subgroups, u_op, v_op

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "DensityMatrix",
    "FiniteStructure",
    "build_structure",
    "computational_basis",
    "dual_basis",
    "enumerate_subgroups",
    "family_basis",
    "galois_field",
    "measure",
    "mub_family",
    "reconstruct",
    "ring_mod_n",
    "u_op",
    "unbiasedness",
    "v_op",
    "verify_axioms",
]
