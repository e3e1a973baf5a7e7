"""Fixed-step integration of the flow of H, drift monitoring and radial checks.

H is not separable (the kinetic term carries the factor 1/(kappa + q^2)), so
the symplectic scheme is the implicit midpoint rule

    z' = z + h X_H((z + z') / 2),

solved by fixed-point iteration with a damped Newton fallback.  Classical RK4
is available as a non-symplectic cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import full_integral_functions
from .core import PhasePoint, SystemParams, eval_eom, eval_h
from .dual import seed_variables
from .errors import NumericalFailure, SingularStateError, ValidationError
from .poisson import PhaseFunction

__all__ = [
    "SCHEMES",
    "SINGULAR_GUARD",
    "Trajectory",
    "DriftReport",
    "RadialObservables",
    "vector_field",
    "step_implicit_midpoint",
    "step_rk4",
    "integrate",
    "drift_report",
    "radial_observables",
]

SCHEMES = ("implicit-midpoint", "rk4-oracle")
SINGULAR_GUARD = 1e-4


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray  # (N,)
    q: np.ndarray  # (N, n)
    p: np.ndarray  # (N, n)
    params: SystemParams
    scheme: str
    step: float

    def __post_init__(self):
        if self.times.ndim != 1 or self.q.shape != self.p.shape or self.q.shape[0] != self.times.size:
            raise ValidationError("times, q and p must describe the same number of samples")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValidationError("trajectory times must be strictly increasing")

    def __len__(self) -> int:
        return self.times.size

    @property
    def states(self) -> list[PhasePoint]:
        return [PhasePoint(qi, pi) for qi, pi in zip(self.q, self.p)]

    def evaluate(self, f: PhaseFunction) -> np.ndarray:
        """Values of ``f`` at every sample."""
        return f.evaluate(list(self.q.T), list(self.p.T))


@dataclass
class DriftReport:
    """Per integral: initial value and max |F(t) - F(0)| / max(1, |F(0)|)."""

    entries: dict[str, tuple[float, float]]
    bound: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = all(d < self.bound for _, d in self.entries.values())

    @property
    def max_drift(self) -> float:
        return max((d for _, d in self.entries.values()), default=0.0)

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "integrals": {
                k: {"initial": v0, "relative_drift": d} for k, (v0, d) in self.entries.items()
            },
            "max_relative_drift": self.max_drift,
            "passed": self.passed,
        }


def vector_field(params: SystemParams, z: np.ndarray) -> np.ndarray:
    """X_H(z) for a flat phase vector ``z = (q, p)``.

    Array fast path of :func:`supint.core.eval_eom` used inside the steppers.
    """
    n = params.n
    q, p = z[:n], z[n:]
    nz, bn = params.centrifugal_terms
    qn = q[nz]
    inv_q2 = 1.0 / (qn * qn)
    x = params.kappa + q @ q
    h = (p @ p - params.c + bn @ inv_q2) / (2.0 * x)
    dp = 2.0 * h * q
    dp[nz] += bn * inv_q2 / qn
    out = np.empty_like(z)
    out[:n] = p / x
    out[n:] = dp / x
    return out


def _vector_field_jacobian(params: SystemParams, z: np.ndarray) -> np.ndarray:
    n = params.n
    comps = seed_variables(z)
    dq, dp = eval_eom(params, comps[:n], comps[n:])
    return np.array([c.grad for c in dq + dp])


def _guard(params: SystemParams, z: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(z)):
        raise NumericalFailure(f"non-finite state {where}")
    q = z[: params.n]
    for i, bi in enumerate(params.b):
        if bi != 0 and abs(q[i]) < SINGULAR_GUARD:
            raise SingularStateError(
                f"|q_{i + 1}| = {abs(q[i]):.3g} fell below {SINGULAR_GUARD:g} {where}"
            )


def _midpoint_newton(params, z, h, z_new, tol, max_iter):
    n2 = z.size
    eye = np.eye(n2)

    def residual(w):
        return w - z - h * vector_field(params, 0.5 * (z + w))

    r = residual(z_new)
    for _ in range(max_iter):
        scale = tol * max(1.0, np.max(np.abs(z_new)))
        if np.max(np.abs(r)) < scale:
            return z_new
        jac = eye - 0.5 * h * _vector_field_jacobian(params, 0.5 * (z + z_new))
        delta = np.linalg.solve(jac, -r)
        lam = 1.0
        norm0 = np.max(np.abs(r))
        while lam > 1e-4:
            trial = z_new + lam * delta
            with np.errstate(all="ignore"):
                r_trial = residual(trial)
            if np.all(np.isfinite(r_trial)) and np.max(np.abs(r_trial)) < norm0:
                break
            lam *= 0.5
        z_new, r = trial, r_trial
    if np.all(np.isfinite(r)) and np.max(np.abs(r)) < 10 * tol * max(1.0, np.max(np.abs(z_new))):
        return z_new
    raise NumericalFailure(f"implicit midpoint did not converge at h={h:g}; try a smaller step")


def _midpoint(params, z, h, tol=1e-13, max_iter=50):
    z_new = z + h * vector_field(params, z)
    scale = tol * max(1.0, np.max(np.abs(z)))
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            nxt = z + h * vector_field(params, 0.5 * (z + z_new))
            diff = np.abs(nxt - z_new).max()
            if not diff < np.inf:
                break
            z_new = nxt
            if diff < scale:
                return z_new
    return _midpoint_newton(params, z, h, z_new, tol, max_iter)


def _rk4(params, z, h):
    k1 = vector_field(params, z)
    k2 = vector_field(params, z + 0.5 * h * k1)
    k3 = vector_field(params, z + 0.5 * h * k2)
    k4 = vector_field(params, z + h * k3)
    return z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _require_physical(params: SystemParams) -> None:
    if not params.physical:
        raise ValidationError("dynamics requires physical parameters (every b_j >= 0)")


def step_implicit_midpoint(
    params: SystemParams, s: PhasePoint, h: float, tol: float = 1e-13, max_iter: int = 50
) -> PhasePoint:
    """One implicit-midpoint step of size ``h`` (negative ``h`` steps backwards)."""
    _require_physical(params)
    if h == 0 or not math.isfinite(h):
        raise ValidationError(f"step must be finite and nonzero, got {h}")
    s.validate(params, SINGULAR_GUARD)
    z = _midpoint(params, s.as_vector(), h, tol, max_iter)
    _guard(params, z, "after implicit midpoint step")
    return PhasePoint.from_vector(z)


def step_rk4(params: SystemParams, s: PhasePoint, h: float) -> PhasePoint:
    _require_physical(params)
    s.validate(params, SINGULAR_GUARD)
    z = _rk4(params, s.as_vector(), h)
    _guard(params, z, "after RK4 step")
    return PhasePoint.from_vector(z)


def integrate(
    params: SystemParams,
    s0: PhasePoint,
    t_final: float,
    h: float,
    scheme: str = "implicit-midpoint",
    t0: float = 0.0,
) -> Trajectory:
    """Integrate from ``t0`` to ``t0 + t_final`` with fixed step ``h``.

    Samples sit at ``t0 + k h``; a shorter last step lands exactly on the
    final time when ``t_final`` is not a multiple of ``h``.
    """
    _require_physical(params)
    if scheme not in SCHEMES:
        raise ValidationError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if not (h > 0 and math.isfinite(h)):
        raise ValidationError(f"step must be > 0, got {h}")
    if not (t_final >= 0 and math.isfinite(t_final)):
        raise ValidationError(f"t_final must be >= 0, got {t_final}")
    s0.validate(params, SINGULAR_GUARD)

    n_full = int(math.floor(t_final / h * (1 + 1e-12)))
    times = list(t0 + h * np.arange(n_full + 1))
    steps = [h] * n_full
    rem = t_final - n_full * h
    if rem > 1e-9 * h:
        times.append(t0 + t_final)
        steps.append(rem)

    advance = _midpoint if scheme == "implicit-midpoint" else _rk4
    zs = np.empty((len(times), 2 * params.n))
    z = s0.as_vector()
    zs[0] = z
    for k, hk in enumerate(steps, start=1):
        z = advance(params, z, hk)
        _guard(params, z, f"at t={times[k]:.6g}")
        zs[k] = z
    n = params.n
    return Trajectory(np.asarray(times), zs[:, :n].copy(), zs[:, n:].copy(), params, scheme, h)


def drift_report(
    traj: Trajectory, integrals: Sequence[PhaseFunction] | None = None, bound: float = 1e-8
) -> DriftReport:
    if integrals is None:
        integrals = full_integral_functions(traj.params)
    entries = {}
    for f in integrals:
        vals = traj.evaluate(f)
        v0 = float(vals[0])
        entries[f.name] = (v0, float(np.max(np.abs(vals - v0)) / max(1.0, abs(v0))))
    return DriftReport(entries, bound)


@dataclass(frozen=True)
class RadialObservables:
    """Radial sl(2) observables along a trajectory and the residuals of their ODEs.

    The ``res_*`` arrays hold the interior samples (centered differences);
    ``casimir_residual`` covers every sample and uses dx/dt = 2 J_0 / x.
    ``eqx_residual`` is x^2 xdot^2 - 4E[(x - alpha)^2 - gamma^2] on the
    interior samples and ``eqx_residual_scaled`` the same relation divided
    by x^2 (velocity units, comparable with ``res_dx``); both are ``None``
    unless E > 0 and c != 0 everywhere.
    """

    times: np.ndarray
    x: np.ndarray
    j_zero: np.ndarray
    j_plus: np.ndarray
    energy: np.ndarray
    casimir: np.ndarray
    res_dx: np.ndarray
    res_dj_zero: np.ndarray
    res_dj_plus: np.ndarray
    casimir_residual: np.ndarray
    eqx_residual: np.ndarray | None
    eqx_residual_scaled: np.ndarray | None

    @property
    def max_residuals(self) -> dict[str, float]:
        out = {
            "dx": float(np.max(np.abs(self.res_dx))),
            "dJ0": float(np.max(np.abs(self.res_dj_zero))),
            "dJ+": float(np.max(np.abs(self.res_dj_plus))),
            "casimir": float(np.max(np.abs(self.casimir_residual))),
        }
        if self.eqx_residual is not None:
            out["eqx"] = float(np.max(np.abs(self.eqx_residual)))
            out["eqx/x^2"] = float(np.max(np.abs(self.eqx_residual_scaled)))
        return out


def _centered(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    return (values[2:] - values[:-2]) / (times[2:] - times[:-2])


def radial_observables(traj: Trajectory) -> RadialObservables:
    if len(traj) < 3:
        raise ValidationError("radial observables need at least 3 samples")
    pr = traj.params
    q, p, t = traj.q, traj.p, traj.times
    b = pr.b_array
    j_minus = np.sum(q * q, axis=1)
    j_zero = np.sum(q * p, axis=1)
    with np.errstate(divide="ignore"):
        cent = np.where(b != 0, b / np.where(q == 0, 1.0, q) ** 2, 0.0)
    j_plus = np.sum(p * p, axis=1) + np.sum(cent, axis=1)
    x = pr.kappa + j_minus
    energy = 2.0 * eval_h(pr, list(q.T), list(p.T))
    C = j_minus * j_plus - j_zero**2

    mid = slice(1, -1)
    xm, j0m, em = x[mid], j_zero[mid], energy[mid]
    xdot = _centered(x, t)
    res_dx = xdot - 2.0 * j0m / xm
    res_j0 = _centered(j_zero, t) - (j_plus[mid] + em * (xm - pr.kappa)) / xm
    res_jp = _centered(j_plus, t) - 2.0 * em * j0m / xm

    xdot_exact = 2.0 * j_zero / x
    c, kap = pr.c, pr.kappa
    cas_res = C - (-0.25 * x**2 * xdot_exact**2 + energy * x**2 + (c - energy * kap) * x - c * kap)

    eqx = eqx_scaled = None
    if c != 0 and np.all(energy > 0):
        alpha = 0.5 * (kap - c / em)
        gamma_sq = 0.25 * (kap + c / em) ** 2 + C[mid] / em
        eqx = xm**2 * xdot**2 - 4.0 * em * ((xm - alpha) ** 2 - gamma_sq)
        eqx_scaled = eqx / xm**2
    return RadialObservables(
        t, x, j_zero, j_plus, energy, C, res_dx, res_j0, res_jp, cas_res, eqx, eqx_scaled
    )
