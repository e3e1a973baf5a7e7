"""Exact trajectories for positive energy (E = 2H > 0, c != 0).

With x = kappa + q^2 the radial motion obeys x^2 xdot^2 = 4E[(x - alpha)^2 - gamma^2],
which integrates to

    2 sqrt(E) (t - tau) = +-( sqrt((x - alpha)^2 - gamma^2) + alpha arccosh((x - alpha)/gamma) ),

and each squared coordinate follows Q_i = alpha_i + gamma_i cosh(X + phi_i),
X = arccosh((x - alpha)/gamma).

Internally the orbit is parametrised by the *signed* anomaly ``X`` (negative
on the incoming branch, positive on the outgoing one).  It satisfies
dX/dt = 2 sqrt(E)/x, so ``x = alpha + gamma cosh X`` and
``t - tau = (gamma sinh X + alpha X) / (2 sqrt(E))`` hold on both branches
and stay well conditioned at the turning point.  Each
``gamma_i cosh(X + phi_i)`` is stored as ``a_i e^X + d_i e^-X``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .algebra import realize_sl2
from .core import PhasePoint, SystemParams, eval_h
from .dynamics import Trajectory
from .errors import NumericalFailure, UnsupportedRegimeError, ValidationError

__all__ = [
    "Branch",
    "OrbitConstants",
    "constants_from_state",
    "time_of_radius",
    "radius_of_time",
    "anomaly_of_time",
    "coords_of_radius",
    "state_at_anomaly",
    "trajectory_closed_form",
    "compatibility_residuals",
    "energy_from_alphas",
]


class Branch(str, Enum):
    INCOMING = "incoming"
    OUTGOING = "outgoing"

    @property
    def sign(self) -> float:
        return 1.0 if self is Branch.OUTGOING else -1.0


@dataclass(frozen=True)
class OrbitConstants:
    params: SystemParams
    E: float
    C: float
    alpha: float
    gamma: float
    tau: float
    alpha_i: np.ndarray
    gamma_i: np.ndarray
    phi_i: np.ndarray
    signs: np.ndarray
    # evaluation coefficients: gamma_i cosh(X + phi_i) = a_i e^X + d_i e^-X
    a_i: np.ndarray
    d_i: np.ndarray
    # coordinates that may pass through zero (b_i = 0, alpha_i <= 0)
    crossing: np.ndarray

    @property
    def turning_radius(self) -> float:
        return self.alpha + self.gamma


def _sign(v: float) -> float:
    return -1.0 if v < 0 else 1.0


def constants_from_state(params: SystemParams, s0: PhasePoint, t0: float = 0.0) -> OrbitConstants:
    """Orbit constants of the trajectory through ``s0`` at time ``t0``."""
    s0.validate(params)
    if params.c == 0:
        raise UnsupportedRegimeError("closed form requires c != 0 (omega_sq > 0)")
    E = 2.0 * float(eval_h(params, s0.q, s0.p))
    if not E > 0:
        raise UnsupportedRegimeError(f"closed form requires E>0, got E={E:.6g}")
    gens = realize_sl2(params, s0)
    C = gens.casimir
    kap, c = params.kappa, params.c
    x0 = kap + gens.j_minus
    alpha = 0.5 * (kap - c / E)
    gamma = math.sqrt(0.25 * (kap + c / E) ** 2 + C / E)
    gap = (x0 - alpha) ** 2 - gamma**2
    if gap < -1e-10 * max(1.0, gamma**2):
        raise ValidationError(f"inconsistent state: (x0-alpha)^2 - gamma^2 = {gap:.3g} < 0")

    rootE = math.sqrt(E)
    X0 = math.asinh(gens.j_zero / (rootE * gamma))
    tau = t0 - (gamma * math.sinh(X0) + alpha * X0) / (2.0 * rootE)

    q0, p0, b = s0.q, s0.p, params.b_array
    Q0 = q0 * q0
    I = p0 * p0 - E * Q0 + np.where(b != 0, b / np.where(q0 == 0, 1.0, Q0), 0.0)
    alpha_i = -I / (2.0 * E)
    gamma_i = np.sqrt(np.maximum(alpha_i**2 + b / E, 0.0))

    n = params.n
    a_i, d_i, phi_i, signs = (np.zeros(n) for _ in range(4))
    crossing = (b == 0) & (alpha_i <= 0)
    for i in range(n):
        u = Q0[i] - alpha_i[i]  # = gamma_i cosh(X0 + phi_i) > 0
        v = q0[i] * p0[i] / rootE  # = gamma_i sinh(X0 + phi_i)
        g2 = gamma_i[i] ** 2
        if v >= 0:
            s = u + v
            a, d = 0.5 * s, (0.5 * g2 / s if s > 0 else 0.0)
        else:
            s = u - v
            a, d = 0.5 * g2 / s, 0.5 * s
        a_i[i], d_i[i] = a * math.exp(-X0), d * math.exp(X0)
        if gamma_i[i] > 0:
            phi_i[i] = math.asinh(v / gamma_i[i]) - X0
        if crossing[i]:
            shape = math.sqrt(a) * math.exp(0.5 * X0) - math.sqrt(d) * math.exp(-0.5 * X0)
            signs[i] = _sign(q0[i]) * _sign(shape) if q0[i] != 0 else _sign(p0[i])
        else:
            signs[i] = _sign(q0[i])
    return OrbitConstants(
        params, E, C, alpha, gamma, tau, alpha_i, gamma_i, phi_i, signs, a_i, d_i, crossing
    )


def compatibility_residuals(oc: OrbitConstants) -> tuple[float, float, float]:
    """Residuals of sum alpha_i + kappa = alpha, sum gamma_i cosh phi_i = gamma,
    sum gamma_i sinh phi_i = 0."""
    return (
        float(np.sum(oc.alpha_i) + oc.params.kappa - oc.alpha),
        float(np.sum(oc.gamma_i * np.cosh(oc.phi_i)) - oc.gamma),
        float(np.sum(oc.gamma_i * np.sinh(oc.phi_i))),
    )


def energy_from_alphas(oc: OrbitConstants) -> float:
    """E = -c / (kappa + 2 sum alpha_i)."""
    return -oc.params.c / (oc.params.kappa + 2.0 * float(np.sum(oc.alpha_i)))


def _radial_arg(oc: OrbitConstants, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    u = (x - oc.alpha) / oc.gamma
    if np.any(u < 1.0 - 1e-12):
        raise ValidationError(
            f"radius below the turning point x = {oc.turning_radius:.17g}: {np.min(x):.17g}"
        )
    return np.maximum(u, 1.0)


def time_of_radius(oc: OrbitConstants, x, branch: Branch | str):
    """Time at which the orbit reaches squared-radius variable ``x`` on ``branch``."""
    branch = Branch(branch)
    u = _radial_arg(oc, x)
    rad = oc.gamma * np.sqrt(u * u - 1.0)
    t = oc.tau + branch.sign * (rad + oc.alpha * np.arccosh(u)) / (2.0 * math.sqrt(oc.E))
    return float(t) if np.ndim(t) == 0 else t


def anomaly_of_time(oc: OrbitConstants, t, tol: float = 1e-13, max_iter: int = 200):
    """Signed anomaly X(t) solving gamma sinh X + alpha X = 2 sqrt(E)(t - tau).

    Safeguarded Newton inside a bracket that is widened geometrically until
    it straddles the root (the left side is strictly increasing in X).
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    target = 2.0 * math.sqrt(oc.E) * (t_arr - oc.tau)
    g, al = oc.gamma, oc.alpha

    def F(X):
        return g * np.sinh(X) + al * X - target

    lo = -np.ones_like(target)
    hi = np.ones_like(target)
    for _ in range(64):
        bad = F(hi) < 0
        if not bad.any():
            break
        hi = np.where(bad, 2.0 * hi, hi)
    for _ in range(64):
        bad = F(lo) > 0
        if not bad.any():
            break
        lo = np.where(bad, 2.0 * lo, lo)

    X = np.zeros_like(target)
    scale = tol * np.maximum(1.0, np.abs(target))
    for _ in range(max_iter):
        f = F(X)
        done = np.abs(f) <= scale
        if done.all():
            break
        lo = np.where(f < 0, X, lo)
        hi = np.where(f > 0, X, hi)
        X_new = X - f / (g * np.cosh(X) + al)
        outside = (X_new <= lo) | (X_new >= hi)
        X_new = np.where(outside, 0.5 * (lo + hi), X_new)
        X = np.where(done, X, X_new)
    else:
        raise NumericalFailure("time inversion did not converge")
    # one more Newton step takes the converged roots to machine precision
    X = X - F(X) / (g * np.cosh(X) + al)
    return float(X[0]) if np.ndim(t) == 0 else X


def radius_of_time(oc: OrbitConstants, t):
    """Inverse of :func:`time_of_radius` (t < tau incoming, t > tau outgoing)."""
    X = anomaly_of_time(oc, t)
    x = oc.alpha + oc.gamma * np.cosh(X)
    return float(x) if np.ndim(x) == 0 else x


def state_at_anomaly(oc: OrbitConstants, X) -> tuple[np.ndarray, np.ndarray]:
    """Positions and momenta, each of shape ``X.shape + (n,)``."""
    X = np.asarray(X, dtype=float)[..., None]
    eX, emX = np.exp(X), np.exp(-X)
    Q = oc.alpha_i + oc.a_i * eX + oc.d_i * emX
    lo = -1e-12 * np.maximum(1.0, np.abs(oc.alpha_i) + oc.gamma_i * np.cosh(X))
    regular = ~oc.crossing
    if np.any((Q < lo) & regular):
        raise NumericalFailure("negative squared coordinate: inconsistent orbit constants")
    rootE = math.sqrt(oc.E)
    with np.errstate(divide="ignore", invalid="ignore"):
        q_reg = oc.signs * np.sqrt(np.maximum(Q, 0.0))
        p_reg = rootE * (oc.a_i * eX - oc.d_i * emX) / q_reg
    ra, rd = np.sqrt(oc.a_i), np.sqrt(oc.d_i)
    half, mhalf = np.exp(0.5 * X), np.exp(-0.5 * X)
    q_cross = oc.signs * (ra * half - rd * mhalf)
    p_cross = oc.signs * rootE * (ra * half + rd * mhalf)
    q = np.where(regular, q_reg, q_cross)
    p = np.where(regular, p_reg, p_cross)
    return q, p


def coords_of_radius(oc: OrbitConstants, x, branch: Branch | str) -> np.ndarray:
    """Position vector where the orbit reaches ``x`` on ``branch``."""
    X = Branch(branch).sign * np.arccosh(_radial_arg(oc, x))
    return state_at_anomaly(oc, X)[0]


def trajectory_closed_form(
    params: SystemParams, s0: PhasePoint, times: Sequence[float], t0: float = 0.0
) -> Trajectory:
    """Exact states at ``times`` for the orbit through ``s0`` at ``t0``."""
    oc = constants_from_state(params, s0, t0)
    times = np.asarray(times, dtype=float)
    X = anomaly_of_time(oc, times)
    q, p = state_at_anomaly(oc, X)
    step = float(np.min(np.diff(times))) if times.size > 1 else 0.0
    return Trajectory(times, q, p, params, "closed-form", step)
