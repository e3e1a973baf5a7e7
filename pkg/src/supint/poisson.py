"""Gradients, canonical Poisson brackets, involution reports and rank analysis.

Phase functions are evaluated on dual numbers (see :mod:`supint.dual`), which
gives derivatives exact to rounding.  Central finite differences are kept as
an independent cross-check only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .core import PhasePoint, SystemParams, random_states
from .dual import Dual, seed_variables
from .errors import SingularStateError

__all__ = [
    "PhaseFunction",
    "BracketReport",
    "gradient",
    "gradient_fd",
    "gradients_batch",
    "hessians_batch",
    "poisson_bracket",
    "brackets_batch",
    "nested_bracket",
    "involution_report",
    "independence_rank",
    "jacobian",
    "coordinate",
    "momentum",
    "constant",
    "corrupt",
]

SINGULAR_PROXIMITY = 1e-6


@dataclass(frozen=True)
class PhaseFunction:
    """A named scalar function of phase space.

    ``fn(q, p)`` receives sequences of components; entries may be floats,
    numpy arrays of samples, or :class:`Dual` numbers.  ``b`` lists the
    centrifugal coefficients whose zero set is singular for the function.
    """

    name: str
    fn: Callable[[Sequence, Sequence], object]
    b: tuple[float, ...] | None = None

    def __call__(self, s: PhasePoint) -> float:
        return float(self.fn(s.q, s.p))

    def evaluate(self, q, p):
        """Evaluate on component sequences; returns ``q[0]``-shaped output."""
        out = self.fn(q, p)
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(q[0]))

    def __add__(self, other: "PhaseFunction") -> "PhaseFunction":
        f, g = self.fn, other.fn
        return PhaseFunction(f"{self.name}+{other.name}", lambda q, p: f(q, p) + g(q, p), self.b)

    def scaled(self, k: float) -> "PhaseFunction":
        f = self.fn
        return PhaseFunction(f"{k:g}*{self.name}", lambda q, p: k * f(q, p), self.b)


def corrupt(family: Sequence[PhaseFunction], name: str, extra: PhaseFunction | None = None):
    """Test hook: replace the member called ``name`` by itself plus ``extra``
    (``q_1`` by default), keeping its name.  Used for negative controls."""
    extra = coordinate(0) if extra is None else extra
    out = []
    found = False
    for f in family:
        if f.name == name:
            g = f + extra
            out.append(PhaseFunction(f.name, g.fn, f.b))
            found = True
        else:
            out.append(f)
    if not found:
        raise KeyError(f"no integral named {name!r} in family {[f.name for f in family]}")
    return out


def coordinate(i: int) -> PhaseFunction:
    return PhaseFunction(f"q{i + 1}", lambda q, p: q[i])


def momentum(i: int) -> PhaseFunction:
    return PhaseFunction(f"p{i + 1}", lambda q, p: p[i])


def constant(value: float) -> PhaseFunction:
    return PhaseFunction(f"{value:g}", lambda q, p: value)


def _check_proximity(f: PhaseFunction, Q: np.ndarray) -> None:
    if f.b is None:
        return
    for i, bi in enumerate(f.b):
        if bi != 0 and np.any(np.abs(Q[..., i]) < SINGULAR_PROXIMITY):
            raise SingularStateError(f"|q_{i + 1}| < {SINGULAR_PROXIMITY:g} with b_{i + 1} > 0")


def _derive(f: PhaseFunction, Q: np.ndarray, P: np.ndarray, order: int):
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    P = np.atleast_2d(np.asarray(P, dtype=float))
    _check_proximity(f, Q)
    n = Q.shape[-1]
    z = np.concatenate([Q, P], axis=-1).T  # (2n, S)
    comps = seed_variables(z, order=order)
    out = f.fn(comps[:n], comps[n:])
    S, k = Q.shape[0], 2 * n
    if not isinstance(out, Dual):
        return np.zeros((S, k)), (np.zeros((S, k, k)) if order == 2 else None)
    grad = np.broadcast_to(out.grad, (S, k)).copy()
    hess = None
    if order == 2:
        hess = np.broadcast_to(out.hess, (S, k, k)).copy()
    return grad, hess


def gradients_batch(f: PhaseFunction, Q: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Gradients ``(df/dq, df/dp)`` at ``S`` states, shape ``(S, 2n)``."""
    return _derive(f, Q, P, order=1)[0]


def hessians_batch(f: PhaseFunction, Q: np.ndarray, P: np.ndarray):
    """Gradients ``(S, 2n)`` and Hessians ``(S, 2n, 2n)`` by second-order duals."""
    return _derive(f, Q, P, order=2)


def gradient(f: PhaseFunction, s: PhasePoint) -> np.ndarray:
    return gradients_batch(f, s.q[None, :], s.p[None, :])[0]


def gradient_fd(f: PhaseFunction, s: PhasePoint) -> np.ndarray:
    """Central finite-difference gradient; an oracle for :func:`gradient`."""
    z = s.as_vector()
    n = s.n
    _check_proximity(f, s.q[None, :])
    base = np.finfo(float).eps ** (1.0 / 3.0)
    out = np.empty_like(z)
    for k in range(z.size):
        step = base * max(1.0, abs(z[k]))
        zp, zm = z.copy(), z.copy()
        zp[k] += step
        zm[k] -= step
        fp = float(f.fn(zp[:n], zp[n:]))
        fm = float(f.fn(zm[:n], zm[n:]))
        out[k] = (fp - fm) / (zp[k] - zm[k])
    return out


def _bracket_from_grads(gf: np.ndarray, gg: np.ndarray) -> np.ndarray:
    n = gf.shape[-1] // 2
    return np.sum(gf[..., :n] * gg[..., n:] - gf[..., n:] * gg[..., :n], axis=-1)


def poisson_bracket(f: PhaseFunction, g: PhaseFunction, s: PhasePoint) -> float:
    """{f, g} = df/dq . dg/dp - df/dp . dg/dq at ``s``."""
    return float(_bracket_from_grads(gradient(f, s), gradient(g, s)))


def brackets_batch(f: PhaseFunction, g: PhaseFunction, Q, P) -> np.ndarray:
    return _bracket_from_grads(gradients_batch(f, Q, P), gradients_batch(g, Q, P))


def _symplectic_apply(v: np.ndarray) -> np.ndarray:
    # Omega @ v with Omega = [[0, I], [-I, 0]], so that {f, g} = grad f . Omega grad g
    n = v.shape[-1] // 2
    return np.concatenate([v[..., n:], -v[..., :n]], axis=-1)


def nested_bracket(f: PhaseFunction, g: PhaseFunction, h: PhaseFunction, Q, P) -> np.ndarray:
    """{f, {g, h}} at a batch of states using exact second derivatives."""
    gf = gradients_batch(f, Q, P)
    gg, Hg = hessians_batch(g, Q, P)
    gh, Hh = hessians_batch(h, Q, P)
    # grad {g,h} = Hg Omega grad h - Hh Omega grad g
    grad_gh = np.einsum("sij,sj->si", Hg, _symplectic_apply(gh)) - np.einsum(
        "sij,sj->si", Hh, _symplectic_apply(gg)
    )
    return _bracket_from_grads(gf, grad_gh)


@dataclass
class BracketReport:
    pairs: list[tuple[str, str]]
    states: list[PhasePoint]
    values: np.ndarray  # (n_samples, n_pairs)
    tolerance: float
    seed: int | None
    max_abs: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.max_abs = float(np.max(np.abs(self.values))) if self.values.size else 0.0
        self.passed = self.max_abs < self.tolerance

    def per_pair_max(self) -> dict[str, float]:
        return {
            f"{{{a},{b}}}": float(np.max(np.abs(self.values[:, k])))
            for k, (a, b) in enumerate(self.pairs)
        }


def involution_report(
    family: Sequence[PhaseFunction],
    params: SystemParams,
    n_samples: int = 100,
    tol: float = 1e-9,
    seed: int | None = 42,
    states: Sequence[PhasePoint] | None = None,
) -> BracketReport:
    """All pairwise brackets of ``family`` at seeded random states."""
    if states is None:
        states = random_states(params, n_samples, seed)
    Q = np.array([s.q for s in states])
    P = np.array([s.p for s in states])
    grads = [gradients_batch(f, Q, P) for f in family]
    pairs, cols = [], []
    for a, b in combinations(range(len(family)), 2):
        pairs.append((family[a].name, family[b].name))
        cols.append(_bracket_from_grads(grads[a], grads[b]))
    values = np.stack(cols, axis=1) if cols else np.zeros((len(states), 0))
    return BracketReport(pairs, list(states), values, tol, seed)


def jacobian(family: Sequence[PhaseFunction], s: PhasePoint) -> np.ndarray:
    return np.array([gradient(f, s) for f in family])


def independence_rank(family: Sequence[PhaseFunction], s: PhasePoint, tol: float = 1e-8) -> int:
    """Numerical rank of the family's Jacobian at ``s``.

    Singular values below ``tol`` times the largest count as zero.
    """
    sv = np.linalg.svd(jacobian(family, s), compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))
