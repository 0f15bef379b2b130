"""Geometric structures: planar symplectic/cosymplectic/conformal, the last
multiplier method and three-dimensional Nambu-Poisson brackets."""

from .ham2d import (
    ConformalData2D,
    CosymplecticData,
    SymplecticData2D,
    conformal_field_2d,
    cosymplectic_residuals,
    hamiltonian_field_2d,
    poisson_bracket_2d,
    symplectic_residuals,
)
from .jlm import (
    CoordinateTransform,
    MultiplierData,
    jlm_residual,
    reconstruct_hamiltonian_2d,
    transform_residual,
)
from .nambu3d import (
    ConformalParams,
    HamiltonianPair,
    NambuData,
    conformal_nambu_field,
    nambu_bracket,
    nambu_field,
)


__all__ = [
    "ConformalData2D",
    "ConformalParams",
    "CoordinateTransform",
    "CosymplecticData",
    "HamiltonianPair",
    "MultiplierData",
    "NambuData",
    "SymplecticData2D",
    "conformal_field_2d",
    "conformal_nambu_field",
    "cosymplectic_residuals",
    "hamiltonian_field_2d",
    "jlm_residual",
    "nambu_bracket",
    "nambu_field",
    "poisson_bracket_2d",
    "reconstruct_hamiltonian_2d",
    "symplectic_residuals",
    "transform_residual",
]
