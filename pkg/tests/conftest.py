from fractions import Fraction

import numpy as np
import pytest

from supint.core import PhasePoint, SystemParams


@pytest.fixture
def worked():
    """n=2, kappa=1, omega^2=1, b=(1,1) at q=(1,1), p=(1,-1): E=1, C=8."""
    return SystemParams(2, 1.0, 1.0, (1.0, 1.0)), PhasePoint([1.0, 1.0], [1.0, -1.0])


def params_for(n: int, kappa: float = 1.0, omega_sq: float = 1.0) -> SystemParams:
    b = [1.0, 0.5, 2.0, 1.5, 0.75, 3.0][:n]
    return SystemParams(n, kappa, omega_sq, tuple(b))


def frac_h(kappa, omega_sq, b, q, p):
    """Rescaled Hamiltonian in exact rational arithmetic (independent oracle)."""
    F = Fraction
    q = [F(v) for v in q]
    p = [F(v) for v in p]
    c = F(kappa) * F(omega_sq)
    cent = sum((F(bj) / qj**2 for bj, qj in zip(b, q) if bj), F(0))
    return (sum(v * v for v in p) - c + cent) / (2 * (F(kappa) + sum(v * v for v in q)))


def as_arrays(states):
    return np.array([s.q for s in states]), np.array([s.p for s in states])
