"""Numerical toolkit for a maximally superintegrable Hamiltonian on a
conformally flat space of nonconstant curvature.

Modules: :mod:`~supint.core` (parameters, Hamiltonians, equations of motion),
:mod:`~supint.algebra` (sl(2) coalgebra integrals), :mod:`~supint.poisson`
(dual-number brackets and rank tests), :mod:`~supint.dynamics` (symplectic
integration), :mod:`~supint.closedform` (exact E > 0 orbits),
:mod:`~supint.geometry` (curvature, potentials, HJ separation) and
:mod:`~supint.cli`.
"""

from .core import PhasePoint, SystemParams, hamiltonian_cal, hamiltonian_h, potential, eom_rhs
from .errors import (
    NumericalFailure,
    SingularStateError,
    SupintError,
    UnsupportedRegimeError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "PhasePoint",
    "SystemParams",
    "hamiltonian_cal",
    "hamiltonian_h",
    "potential",
    "eom_rhs",
    "SupintError",
    "ValidationError",
    "SingularStateError",
    "UnsupportedRegimeError",
    "NumericalFailure",
]
