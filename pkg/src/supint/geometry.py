"""Riemannian geometry of the conformally flat space ds^2 = (kappa + q^2) dq^2.

Includes the closed-form scalar curvature and an independent finite-difference
curvature computation, the radial Laplace-Beltrami operator on the
three-dimensional space, its Green function ``v(r) = sqrt(kappa + r^2)/r``, the
intrinsic Kepler and harmonic potentials built from it, the cotangent-norm
decomposition of the physical Hamiltonian, and the Cartesian Hamilton-Jacobi
separation that links the system to the flat Smorodinsky-Winternitz one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import extra_integral_function
from .core import PhasePoint, SystemParams, centrifugal, eval_h, norm_sq
from .dual import Dual, sqrt
from .dynamics import Trajectory
from .errors import ValidationError

__all__ = [
    "MetricSample",
    "SWCorrespondence",
    "conformal_factor",
    "metric_sample",
    "scalar_curvature",
    "curvature_oracle",
    "scalar_curvature_fd",
    "laplace_beltrami_radial",
    "green_function",
    "intrinsic_potentials",
    "cotangent_norm",
    "hamiltonian_decomposition",
    "sw_hj_check",
]


def conformal_factor(params: SystemParams, q) -> float:
    q = np.asarray(q, dtype=float)
    return params.kappa + float(q @ q)


def scalar_curvature(params: SystemParams, q) -> float:
    """R = -(n-1)(3(n-2) q^2 + 2 kappa n) / (kappa + q^2)^3."""
    q = np.asarray(q, dtype=float).reshape(-1)
    n, kap = q.size, params.kappa
    r2 = float(q @ q)
    return -(n - 1) * (3 * (n - 2) * r2 + 2 * kap * n) / (kap + r2) ** 3


@dataclass(frozen=True)
class MetricSample:
    q: np.ndarray
    conformal_factor: float
    scalar_curvature: float


def metric_sample(params: SystemParams, q) -> MetricSample:
    q = np.asarray(q, dtype=float).reshape(-1)
    return MetricSample(q, conformal_factor(params, q), scalar_curvature(params, q))


def _christoffel(metric: Callable[[np.ndarray], np.ndarray], q: np.ndarray, h: float) -> np.ndarray:
    """Gamma[k, i, j] from central differences of the metric."""
    n = q.size
    dg = np.empty((n, n, n))  # dg[l, i, j] = d_l g_ij
    for l in range(n):
        e = np.zeros(n)
        e[l] = h
        dg[l] = (metric(q + e) - metric(q - e)) / (2 * h)
    ginv = np.linalg.inv(metric(q))
    # Gamma^k_ij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij)
    lower = 0.5 * (
        np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg
    )
    return np.einsum("kl,lij->kij", ginv, lower)


def scalar_curvature_fd(
    metric: Callable[[np.ndarray], np.ndarray],
    q,
    step: float = 1e-5,
    outer_step: float = 1e-4,
) -> float:
    """Scalar curvature of an arbitrary metric field by finite differences.

    Christoffel symbols use central differences of ``metric`` with ``step``;
    their derivatives are central differences with ``outer_step``.  Then

        R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik,
        R = g^ij R_ij.
    """
    q = np.asarray(q, dtype=float).reshape(-1)
    n = q.size
    gam = _christoffel(metric, q, step)
    dgam = np.empty((n, n, n, n))  # dgam[m, k, i, j] = d_m Gamma^k_ij
    for m in range(n):
        e = np.zeros(n)
        e[m] = outer_step
        dgam[m] = (_christoffel(metric, q + e, step) - _christoffel(metric, q - e, step)) / (
            2 * outer_step
        )
    ricci = (
        np.einsum("kkij->ij", dgam)
        - np.einsum("jkik->ij", dgam)
        + np.einsum("kkl,lij->ij", gam, gam)
        - np.einsum("kjl,lik->ij", gam, gam)
    )
    return float(np.einsum("ij,ij->", np.linalg.inv(metric(q)), ricci))


def curvature_oracle(params: SystemParams, q, step: float = 1e-5, outer_step: float = 1e-4) -> float:
    """Scalar curvature of (kappa + q^2) delta_ij from first principles (n <= 4)."""
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.size > 4:
        raise ValidationError("curvature_oracle supports n <= 4")
    kap = params.kappa

    def metric(x):
        return (kap + x @ x) * np.eye(x.size)

    return scalar_curvature_fd(metric, q, step, outer_step)


def green_function(params: SystemParams, r):
    """v(r) = sqrt(kappa + r^2) / r, harmonic on the 3-space for r > 0."""
    return sqrt(params.kappa + r * r) / r


def laplace_beltrami_radial(params: SystemParams, f: Callable, r: float) -> float:
    """Laplace-Beltrami operator of a radial function on the three-dimensional space.

    (1 / (r^2 (kappa + r^2))) d/dr (r^2 sqrt(kappa + r^2) df/dr), with f', f''
    obtained by evaluating ``f`` on a second-order dual number.

    The two terms of the flux derivative cancel to O(eps / r^3) for harmonic
    functions, so the evaluation runs in ``np.longdouble``.
    """
    if not r > 0:
        raise ValidationError(f"r must be > 0, got {r}")
    wide = np.longdouble
    r = wide(r)
    kap = wide(params.kappa)
    out = f(Dual(r, np.ones(1, dtype=wide), np.zeros((1, 1), dtype=wide)))
    if not isinstance(out, Dual):
        return 0.0
    d1, d2 = out.grad[0], out.hess[0, 0]
    s = np.sqrt(kap + r * r)
    flux_derivative = (2 * r * s + r**3 / s) * d1 + r * r * s * d2
    return float(flux_derivative / (r * r * (kap + r * r)))


def intrinsic_potentials(params: SystemParams, K: float, q) -> tuple[float, float]:
    """(K v(|q|), K v(|q|)^-2): intrinsic Kepler and harmonic potentials."""
    q = np.asarray(q, dtype=float)
    r2 = float(q @ q)
    v_harm = K * r2 / (params.kappa + r2)
    if r2 == 0:
        raise ValidationError("the Kepler potential is singular at q = 0")
    v_kep = K * math.sqrt(params.kappa + r2) / math.sqrt(r2)
    return v_kep, v_harm


def cotangent_norm(params: SystemParams, p, q) -> float:
    """|p|^2 measured by the inverse metric: p^2 / (kappa + q^2)."""
    p = np.asarray(p, dtype=float)
    return float(p @ p) / conformal_factor(params, q)


def hamiltonian_decomposition(params: SystemParams, s: PhasePoint) -> tuple[float, float, float]:
    """Split Hcal = |p|^2 + V_Harm + (kappa + q^2)^-1 sum_j b_j q_j^-2.

    The harmonic strength is K = omega_sq, giving V_Harm = omega_sq q^2/(kappa + q^2).
    """
    s.validate(params)
    kinetic = cotangent_norm(params, s.p, s.q)
    v_harm = (
        intrinsic_potentials(params, params.omega_sq, s.q)[1] if np.any(s.q != 0) else 0.0
    )
    barrier = float(centrifugal(params, s.q)) / conformal_factor(params, s.q)
    return kinetic, v_harm, barrier


@dataclass(frozen=True)
class SWCorrespondence:
    """Cartesian separation constants of the Hamilton-Jacobi equation.

    ``lambda_i`` are the values of I_i; they sum to ``constraint_value`` =
    c + kappa E.  ``separated_residual`` is the largest violation of
    p_i^2 = lambda_i + E q_i^2 - b_i q_i^-2 over the checked states.
    """

    E: float
    lambda_i: np.ndarray
    constraint_value: float
    sum_residual: float
    separated_residual: float


def sw_hj_check(
    params: SystemParams, s0: PhasePoint, trajectory: Trajectory | None = None
) -> SWCorrespondence:
    s0.validate(params)
    E = 2.0 * float(eval_h(params, s0.q, s0.p))
    lam = np.array([extra_integral_function(params, i)(s0) for i in range(params.n)])
    target = params.c + params.kappa * E
    if trajectory is None:
        q, p = s0.q[None, :], s0.p[None, :]
    else:
        q, p = trajectory.q, trajectory.p
    b = params.b_array
    with np.errstate(divide="ignore"):
        barrier = np.where(b != 0, b / np.where(q == 0, 1.0, q) ** 2, 0.0)
    sep = p * p - (lam + E * q * q - barrier)
    return SWCorrespondence(
        E, lam, target, float(np.sum(lam) - target), float(np.max(np.abs(sep)))
    )
