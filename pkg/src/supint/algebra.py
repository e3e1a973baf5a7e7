"""The sl(2) coalgebra realization and the first integrals it generates.

Generators at a phase point::

    J_- = q^2,   J_0 = p.q,   J_+ = p^2 + sum_j b_j / q_j^2

with Lie-Poisson relations {J_0, J_+} = 2 J_+, {J_0, J_-} = -2 J_-,
{J_-, J_+} = 4 J_0 and Casimir C = J_- J_+ - J_0^2.  The left/right partial
Casimirs restrict the coproduct to the first/last ``m`` degrees of freedom,
and the extra integrals ``I_i = p_i^2 - 2 H q_i^2 + b_i / q_i^2`` complete a
maximal set of 2n - 1 independent integrals.

The realization tolerates negative ``b_j`` (``SystemParams(physical=False)``).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import PhasePoint, SystemParams, eval_h, norm_sq
from .errors import ValidationError
from .poisson import PhaseFunction

__all__ = [
    "SL2Generators",
    "FamilyKind",
    "IntegralFamily",
    "realize_sl2",
    "casimir",
    "casimir_angular",
    "partial_casimir_left",
    "partial_casimir_right",
    "extra_integral",
    "full_integral_set",
    "full_integral_labels",
    "full_integral_functions",
    "hamiltonian_function",
    "casimir_function",
    "left_casimir_function",
    "right_casimir_function",
    "extra_integral_function",
    "family_functions",
    "generator_functions",
    "integral_family",
]


@dataclass(frozen=True)
class SL2Generators:
    j_minus: float
    j_zero: float
    j_plus: float

    @property
    def casimir(self) -> float:
        return self.j_minus * self.j_plus - self.j_zero**2

    def hamiltonian(self, params: SystemParams) -> float:
        """H = (J_+ - c) / (2 (kappa + J_-))."""
        return (self.j_plus - params.c) / (2.0 * (params.kappa + self.j_minus))


class FamilyKind(str, Enum):
    LEFT = "left-casimirs"
    RIGHT = "right-casimirs"
    EXTRA = "extra-Ii"


@dataclass(frozen=True)
class IntegralFamily:
    labels: tuple[str, ...]
    values: np.ndarray
    family_kind: FamilyKind


# --- component formulas -----------------------------------------------------

def _j_minus(q, p):
    return norm_sq(q)


def _j_zero(q, p):
    return sum(qi * pi for qi, pi in zip(q, p))


def _j_plus(b):
    def f(q, p):
        return norm_sq(p) + sum(bj / (qj * qj) for bj, qj in zip(b, q) if bj != 0)

    return f


def _pair_sum(b, q, p, idx):
    total = 0.0
    for a, i in enumerate(idx):
        for j in idx[a + 1 :]:
            lij = q[i] * p[j] - q[j] * p[i]
            total = total + lij * lij
            if b[i] != 0:
                total = total + b[i] * q[j] * q[j] / (q[i] * q[i])
            if b[j] != 0:
                total = total + b[j] * q[i] * q[i] / (q[j] * q[j])
    return total + sum(b[i] for i in idx)


def _casimir_expr(params: SystemParams, idx):
    b = params.b
    return lambda q, p: _pair_sum(b, q, p, idx)


def _extra_expr(params: SystemParams, i: int):
    bi = params.b[i]

    def f(q, p):
        out = p[i] * p[i] - 2.0 * eval_h(params, q, p) * q[i] * q[i]
        if bi != 0:
            out = out + bi / (q[i] * q[i])
        return out

    return f


def _check_m(params: SystemParams, m: int) -> None:
    if not (1 < m <= params.n):
        raise ValidationError(f"partial Casimir index m must satisfy 1 < m <= n={params.n}, got {m}")


def _check_i(params: SystemParams, i: int) -> None:
    if not (0 <= i < params.n):
        raise ValidationError(f"integral index must be in [0, {params.n}), got {i}")


# --- phase functions -----------------------------------------------------------

def hamiltonian_function(params: SystemParams) -> PhaseFunction:
    return PhaseFunction("H", lambda q, p: eval_h(params, q, p), params.b)


def generator_functions(params: SystemParams) -> tuple[PhaseFunction, PhaseFunction, PhaseFunction]:
    """(J_-, J_0, J_+) as phase functions."""
    return (
        PhaseFunction("J-", _j_minus, params.b),
        PhaseFunction("J0", _j_zero, params.b),
        PhaseFunction("J+", _j_plus(params.b), params.b),
    )


def left_casimir_function(params: SystemParams, m: int) -> PhaseFunction:
    _check_m(params, m)
    return PhaseFunction(f"C^({m})", _casimir_expr(params, list(range(m))), params.b)


def right_casimir_function(params: SystemParams, m: int) -> PhaseFunction:
    _check_m(params, m)
    n = params.n
    return PhaseFunction(f"C_({m})", _casimir_expr(params, list(range(n - m, n))), params.b)


def casimir_function(params: SystemParams) -> PhaseFunction:
    j_minus, j_zero, j_plus = generator_functions(params)

    def f(q, p):
        j0 = j_zero.fn(q, p)
        return j_minus.fn(q, p) * j_plus.fn(q, p) - j0 * j0

    return PhaseFunction("C", f, params.b)


def extra_integral_function(params: SystemParams, i: int) -> PhaseFunction:
    _check_i(params, i)
    return PhaseFunction(f"I_{i + 1}", _extra_expr(params, i), params.b)


def family_functions(params: SystemParams, kind: FamilyKind | str) -> list[PhaseFunction]:
    """The three involutive families, each headed by H.

    left: {H, C^(m) : 1 < m <= n};  right: {H, C_(m) : 1 < m <= n};
    extra: {H, I_i : 1 <= i <= n}.
    """
    kind = FamilyKind(kind)
    fam = [hamiltonian_function(params)]
    if kind is FamilyKind.LEFT:
        fam += [left_casimir_function(params, m) for m in range(2, params.n + 1)]
    elif kind is FamilyKind.RIGHT:
        fam += [right_casimir_function(params, m) for m in range(2, params.n + 1)]
    else:
        fam += [extra_integral_function(params, i) for i in range(params.n)]
    return fam


def full_integral_functions(params: SystemParams, extra_index: int = 0) -> list[PhaseFunction]:
    """The canonical maximal set, in the fixed order

    (H, C^(2), ..., C^(n-1), C_(2), ..., C_(n), I_k)

    with ``k = extra_index + 1`` (``I_1`` by default): 2n - 1 functions.
    """
    _check_i(params, extra_index)
    fam = [hamiltonian_function(params)]
    fam += [left_casimir_function(params, m) for m in range(2, params.n)]
    fam += [right_casimir_function(params, m) for m in range(2, params.n + 1)]
    fam.append(extra_integral_function(params, extra_index))
    return fam


def full_integral_labels(params: SystemParams, extra_index: int = 0) -> list[str]:
    return [f.name for f in full_integral_functions(params, extra_index)]


# --- state-level operations -------------------------------------------------

def _validated(params: SystemParams, s: PhasePoint) -> PhasePoint:
    return s.validate(params)


def realize_sl2(params: SystemParams, s: PhasePoint) -> SL2Generators:
    _validated(params, s)
    return SL2Generators(
        float(_j_minus(s.q, s.p)), float(_j_zero(s.q, s.p)), float(_j_plus(params.b)(s.q, s.p))
    )


def casimir(params: SystemParams, s: PhasePoint) -> float:
    """C = J_- J_+ - J_0^2."""
    return realize_sl2(params, s).casimir


def casimir_angular(params: SystemParams, s: PhasePoint) -> float:
    """The same Casimir written as L^2 + sum_j b_j q^2 / q_j^2."""
    _validated(params, s)
    q, p = s.q, s.p
    l2 = sum((q[i] * p[j] - q[j] * p[i]) ** 2 for i in range(s.n) for j in range(i + 1, s.n))
    q2 = float(q @ q)
    return float(l2 + sum(bj * q2 / qj**2 for bj, qj in zip(params.b, q) if bj != 0))


def partial_casimir_left(params: SystemParams, s: PhasePoint, m: int) -> float:
    return left_casimir_function(params, m)(_validated(params, s))


def partial_casimir_right(params: SystemParams, s: PhasePoint, m: int) -> float:
    return right_casimir_function(params, m)(_validated(params, s))


def extra_integral(params: SystemParams, s: PhasePoint, i: int) -> float:
    """I_i with a zero-based index ``i``."""
    return extra_integral_function(params, i)(_validated(params, s))


def full_integral_set(params: SystemParams, s: PhasePoint, extra_index: int = 0) -> np.ndarray:
    _validated(params, s)
    return np.array([f(s) for f in full_integral_functions(params, extra_index)])


def integral_family(params: SystemParams, s: PhasePoint, kind: FamilyKind | str) -> IntegralFamily:
    """Values of one involutive family (without its leading H) at ``s``."""
    _validated(params, s)
    fam = family_functions(params, kind)[1:]
    return IntegralFamily(
        tuple(f.name for f in fam), np.array([f(s) for f in fam]), FamilyKind(kind)
    )
