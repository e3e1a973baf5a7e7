"""Verification reports and file emission shared by the command line."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    FamilyKind,
    extra_integral_function,
    family_functions,
    full_integral_functions,
    generator_functions,
    hamiltonian_function,
)
from .closedform import compatibility_residuals, constants_from_state, trajectory_closed_form
from .core import SystemParams, eval_hcal, random_states
from .dynamics import Trajectory, drift_report, integrate
from .geometry import (
    conformal_factor,
    green_function,
    intrinsic_potentials,
    laplace_beltrami_radial,
    scalar_curvature,
)
from .poisson import PhaseFunction, corrupt, gradients_batch, independence_rank, involution_report

__all__ = [
    "format_float",
    "write_csv",
    "write_json",
    "trajectory_rows",
    "verification_report",
    "closed_form_comparison",
    "geometry_table",
]


def format_float(v: float) -> str:
    """17 significant digits, locale independent."""
    return format(float(v), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> int:
    count = 0
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_float(v) for v in row) + "\n")
            count += 1
    return count


def _csv_label(name: str) -> str:
    # C^(m) -> C_left_m, C_(m) -> C_right_m; I_i stays
    if name.startswith("C^("):
        return f"C_left_{name[3:-1]}"
    if name.startswith("C_("):
        return f"C_right_{name[3:-1]}"
    return name


def trajectory_rows(traj: Trajectory, integrals: Sequence[PhaseFunction] | None = None):
    """Header and row matrix: t, q1..qn, p1..pn, H, then the non-H integrals."""
    params = traj.params
    if integrals is None:
        integrals = full_integral_functions(params)
    n = params.n
    header = ["t"] + [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)] + ["H"]
    cols = [traj.times[:, None], traj.q, traj.p, traj.evaluate(hamiltonian_function(params))[:, None]]
    for f in integrals:
        if f.name == "H":
            continue
        header.append(_csv_label(f.name))
        cols.append(traj.evaluate(f)[:, None])
    return header, np.hstack(cols)


def _check(name: str, residual: float, tol: float, **extra) -> dict:
    entry = {"name": name, "max_residual": residual, "tolerance": tol, "passed": bool(residual < tol)}
    entry.update(extra)
    return entry


def verification_report(
    params: SystemParams,
    seed: int = 42,
    samples: int = 100,
    rank_states: int = 20,
    bracket_tol: float = 1e-9,
    rank_tol: float = 1e-8,
    identity_tol: float = 1e-12,
    corrupt_integral: str | None = None,
) -> dict:
    """Involution, independence, sum identity and Lie-Poisson checks."""
    n = params.n

    def hooked(fam):
        if corrupt_integral and any(f.name == corrupt_integral for f in fam):
            return corrupt(fam, corrupt_integral)
        return fam

    checks = []
    states = random_states(params, samples, seed)
    for kind in FamilyKind:
        rep = involution_report(hooked(family_functions(params, kind)), params, states=states, tol=bracket_tol, seed=seed)
        checks.append(_check(f"involution:{kind.value}", rep.max_abs, bracket_tol, pairs=rep.per_pair_max()))

    full = hooked(full_integral_functions(params))
    H = full[0]
    comm = involution_report([H] + full[1:], params, states=states, tol=bracket_tol, seed=seed)
    first_row = {k: v for k, v in comm.per_pair_max().items() if k.startswith("{H,")}
    checks.append(_check("first-integrals:{H,F}", max(first_row.values(), default=0.0), bracket_tol, pairs=first_row))

    rank_pts = random_states(params, rank_states, seed + 1)
    ranks = [independence_rank(full, s, rank_tol) for s in rank_pts]
    expected = 2 * n - 1
    checks.append(
        _check(
            "independence-rank",
            float(max(abs(r - expected) for r in ranks)),
            1.0,
            expected=expected,
            observed=sorted(set(ranks)),
            states=rank_states,
            rank_tol=rank_tol,
        )
    )
    extra_ranks = [
        independence_rank(full + [extra_integral_function(params, j)], s, rank_tol)
        for s in rank_pts
        for j in range(n)
    ]
    checks.append(
        _check(
            "maximality-rank",
            float(max(max(r - expected, 0) for r in extra_ranks)),
            1.0,
            expected=expected,
            observed=sorted(set(extra_ranks)),
        )
    )

    Q = np.array([s.q for s in states])
    P = np.array([s.p for s in states])
    qc, pc = list(Q.T), list(P.T)
    extras = hooked([extra_integral_function(params, i) for i in range(n)])
    total = sum(f.evaluate(qc, pc) for f in extras)
    target = params.kappa * eval_hcal(params, qc, pc)
    rel = np.abs(total - target) / np.maximum(1.0, np.abs(target))
    checks.append(_check("sum-identity:sum(I)=kappa*Hcal", float(np.max(rel)), identity_tol))

    jm, j0, jp = generator_functions(params)
    g = {f.name: gradients_batch(f, Q, P) for f in (jm, j0, jp)}
    vals = {f.name: f.evaluate(qc, pc) for f in (jm, j0, jp)}

    def br(a, b):
        ga, gb = g[a], g[b]
        return np.sum(ga[:, :n] * gb[:, n:] - ga[:, n:] * gb[:, :n], axis=1)

    lie = {
        "{J0,J+}-2J+": br("J0", "J+") - 2 * vals["J+"],
        "{J0,J-}+2J-": br("J0", "J-") + 2 * vals["J-"],
        "{J-,J+}-4J0": br("J-", "J+") - 4 * vals["J0"],
    }
    for name, res in lie.items():
        checks.append(_check(f"lie-poisson:{name}", float(np.max(np.abs(res))), bracket_tol))

    return {
        "seed": seed,
        "samples": samples,
        "system": {"n": n, "kappa": params.kappa, "omega_sq": params.omega_sq, "b": list(params.b)},
        "corrupt_integral": corrupt_integral,
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
    }


def closed_form_comparison(
    params: SystemParams, s0, t_final: float, step: float, scheme: str, tol: float = 1e-6
):
    """Closed-form and numerical trajectories on one grid, plus a summary."""
    oc = constants_from_state(params, s0)
    numeric = integrate(params, s0, t_final, step, scheme)
    exact = trajectory_closed_form(params, s0, numeric.times)
    dq = float(np.max(np.abs(exact.q - numeric.q)))
    dp = float(np.max(np.abs(exact.p - numeric.p)))
    drift = drift_report(exact, bound=1e-9)
    summary = {
        "scheme": scheme,
        "step": step,
        "t_final": t_final,
        "samples": len(exact),
        "max_abs_dq": dq,
        "max_abs_dp": dp,
        "tolerance": tol,
        "passed": bool(dq < tol),
        "orbit_constants": {
            "E": oc.E,
            "C": oc.C,
            "alpha": oc.alpha,
            "gamma": oc.gamma,
            "tau": oc.tau,
            "alpha_i": oc.alpha_i,
            "gamma_i": oc.gamma_i,
            "phi_i": oc.phi_i,
            "signs": oc.signs,
        },
        "compatibility_residuals": dict(
            zip(("alpha_sum", "gamma_cosh_sum", "gamma_sinh_sum"), compatibility_residuals(oc))
        ),
        "closed_form_integral_drift": drift.to_dict(),
    }
    return exact, numeric, summary


def geometry_table(params: SystemParams, radii: Sequence[float], K: float = 1.0) -> dict:
    """Curvature, Green function, potentials and harmonicity along the q_1 axis."""
    rows = []
    for r in radii:
        q = np.zeros(params.n)
        q[0] = r
        row = {
            "r": float(r),
            "conformal_factor": conformal_factor(params, q),
            "scalar_curvature": scalar_curvature(params, q),
            "green_function": None,
            "V_Kepler": None,
            "V_Harm": K * r * r / (params.kappa + r * r),
            "harmonicity_residual": None,
        }
        if r > 0:
            row["green_function"] = float(green_function(params, r))
            row["V_Kepler"], row["V_Harm"] = intrinsic_potentials(params, K, q)
            row["harmonicity_residual"] = laplace_beltrami_radial(
                params, lambda x: green_function(params, x), r
            )
        rows.append(row)
    return {"n": params.n, "kappa": params.kappa, "K": K, "rows": rows}
