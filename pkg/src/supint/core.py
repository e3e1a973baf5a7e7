"""System parameters, phase-space states, the Hamiltonians and their vector field.

Two equivalent Hamiltonians are provided.  ``hamiltonian_cal`` is the physical
one,

    Hcal = (p^2 + w2 q^2 + sum_j b_j / q_j^2) / (kappa + q^2),

and ``hamiltonian_h`` is the rescaled one used for dynamics,

    H = (p^2 - c + sum_j b_j / q_j^2) / (2 (kappa + q^2)),   c = kappa w2,

with ``Hcal = 2 H + w2``.  Both share orbits; H's flow runs at half speed.

The ``eval_*`` functions take position/momentum *components* (any sequence
whose entries support ``+ - * /``: floats, numpy arrays holding many samples,
or :class:`~supint.dual.Dual` numbers) so the same formula feeds evaluation,
batched evaluation and algorithmic differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import SingularStateError, ValidationError

__all__ = [
    "SystemParams",
    "PhasePoint",
    "hamiltonian_cal",
    "hamiltonian_h",
    "potential",
    "eom_rhs",
    "eval_hcal",
    "eval_h",
    "eval_potential",
    "eval_eom",
    "random_states",
]


@dataclass(frozen=True)
class SystemParams:
    """Dimension and constants of the system.

    ``physical=False`` relaxes the sign constraint on ``b`` so the coalgebra
    realization can be exercised with arbitrary real ``b_j``; such parameter
    sets are rejected by the integrators.
    """

    n: int
    kappa: float
    omega_sq: float
    b: tuple[float, ...]
    physical: bool = True
    c: float = field(init=False)

    def __post_init__(self):
        b = tuple(float(v) for v in np.atleast_1d(np.asarray(self.b, dtype=float)))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "omega_sq", float(self.omega_sq))
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if len(b) != self.n:
            raise ValidationError(f"b must have length n={self.n}, got {len(b)}")
        if not all(np.isfinite(b)) or not np.isfinite(self.kappa) or not np.isfinite(self.omega_sq):
            raise ValidationError("parameters must be finite")
        if not self.kappa > 0:
            raise ValidationError(f"kappa must be > 0, got {self.kappa}")
        if self.omega_sq < 0:
            raise ValidationError(f"omega_sq must be >= 0, got {self.omega_sq}")
        if self.physical and any(v < 0 for v in b):
            raise ValidationError(f"every b_j must be >= 0, got {b}")
        object.__setattr__(self, "c", self.kappa * self.omega_sq)

    @property
    def b_array(self) -> np.ndarray:
        return np.asarray(self.b)

    @cached_property
    def centrifugal_terms(self) -> tuple[np.ndarray, np.ndarray]:
        """Indices with b_j != 0 and the matching coefficients."""
        b = np.asarray(self.b)
        idx = np.flatnonzero(b)
        return idx, b[idx]


@dataclass(frozen=True)
class PhasePoint:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(-1)
        p = np.array(self.p, dtype=float).reshape(-1)
        if q.shape != p.shape:
            raise ValidationError(f"q and p must have equal length, got {q.size} and {p.size}")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_vector(cls, z) -> "PhasePoint":
        z = np.asarray(z, dtype=float)
        n = z.size // 2
        return cls(z[:n], z[n:])

    def validate(self, params: SystemParams, min_abs_q: float = 0.0) -> "PhasePoint":
        """Raise unless the state is usable with ``params``."""
        if self.n != params.n:
            raise ValidationError(f"state has dimension {self.n}, params expect {params.n}")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p))):
            raise ValidationError("state must be finite")
        for i, bi in enumerate(params.b):
            if bi != 0 and abs(self.q[i]) <= min_abs_q:
                raise SingularStateError(
                    f"q_{i + 1} = {self.q[i]:g} is singular for b_{i + 1} = {bi:g}"
                )
        return self


# --- component-wise formulas ------------------------------------------------

def _sq(v):
    return v * v


def norm_sq(u: Sequence):
    return sum(_sq(ui) for ui in u)


def centrifugal(params: SystemParams, q: Sequence):
    """sum_j b_j q_j^-2, skipping b_j = 0 so that q_j = 0 stays regular."""
    return sum(bj / _sq(qj) for bj, qj in zip(params.b, q) if bj != 0)


def eval_hcal(params: SystemParams, q: Sequence, p: Sequence):
    q2 = norm_sq(q)
    return (norm_sq(p) + params.omega_sq * q2 + centrifugal(params, q)) / (params.kappa + q2)


def eval_h(params: SystemParams, q: Sequence, p: Sequence):
    q2 = norm_sq(q)
    return (norm_sq(p) - params.c + centrifugal(params, q)) / (2.0 * (params.kappa + q2))


def eval_potential(params: SystemParams, q: Sequence):
    q2 = norm_sq(q)
    return (params.omega_sq * q2 + centrifugal(params, q)) / (params.kappa + q2)


def eval_eom(params: SystemParams, q: Sequence, p: Sequence):
    """Return ``(dq, dp)`` lists of components of the flow of H."""
    x = params.kappa + norm_sq(q)
    h = eval_h(params, q, p)
    dq = [pi / x for pi in p]
    dp = []
    for bi, qi in zip(params.b, q):
        force = 2.0 * h * qi
        if bi != 0:
            force = force + bi / (qi * qi * qi)
        dp.append(force / x)
    return dq, dp


# --- public state-level operations -----------------------------------------

def hamiltonian_cal(params: SystemParams, s: PhasePoint) -> float:
    s.validate(params)
    return float(eval_hcal(params, s.q, s.p))


def hamiltonian_h(params: SystemParams, s: PhasePoint) -> float:
    s.validate(params)
    return float(eval_h(params, s.q, s.p))


def potential(params: SystemParams, q) -> float:
    q = np.asarray(q, dtype=float).reshape(-1)
    PhasePoint(q, np.zeros_like(q)).validate(params)
    return float(eval_potential(params, q))


def eom_rhs(params: SystemParams, s: PhasePoint) -> tuple[np.ndarray, np.ndarray]:
    """Time derivatives ``(dq/dt, dp/dt)`` under H at ``s``."""
    s.validate(params)
    dq, dp = eval_eom(params, s.q, s.p)
    return np.array(dq, dtype=float), np.array(dp, dtype=float)


def random_states(
    params: SystemParams,
    count: int,
    rng: np.random.Generator | int | None = None,
    q_range: tuple[float, float] = (0.2, 2.0),
    p_range: tuple[float, float] = (-2.0, 2.0),
) -> list[PhasePoint]:
    """Reproducible test states kept away from the ``q_i = 0`` singularities.

    |q_i| is uniform in ``q_range``; its sign is randomized only where
    ``b_i = 0``.  Momenta are uniform in ``p_range``.
    """
    rng = np.random.default_rng(rng)
    b = params.b_array
    states = []
    for _ in range(count):
        q = rng.uniform(*q_range, size=params.n)
        flip = rng.choice([-1.0, 1.0], size=params.n)
        q = np.where(b == 0, q * flip, q)
        p = rng.uniform(*p_range, size=params.n)
        states.append(PhasePoint(q, p))
    return states
