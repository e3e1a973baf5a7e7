"""Forward-mode dual numbers carrying a gradient and, optionally, a Hessian.

A :class:`Dual` holds a value array together with its derivatives with
respect to ``k`` seed directions.  The value may be a scalar or an array of
independent samples (e.g. many phase-space points evaluated at once); the
gradient has shape ``val.shape + (k,)`` and the Hessian ``val.shape + (k, k)``.

Only the arithmetic needed by rational/algebraic phase functions is provided:
``+ - * /``, real powers and :func:`sqrt`.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Dual", "sqrt", "value_of", "seed_variables"]


def _real(a):
    # keep floating dtypes (long double included); promote everything else
    a = np.asarray(a)
    return a if a.dtype.kind == "f" else a.astype(float)


def _col(a, extra: int):
    a = _real(a)
    return a.reshape(a.shape + (1,) * extra)


def _outer(u, v):
    return u[..., :, None] * v[..., None, :]


class Dual:
    __slots__ = ("val", "grad", "hess")
    __array_priority__ = 1000  # make ndarray defer to our reflected operators

    def __init__(self, val, grad, hess=None):
        self.val = _real(val)
        self.grad = _real(grad)
        self.hess = None if hess is None else _real(hess)

    @property
    def order(self) -> int:
        return 1 if self.hess is None else 2

    def __repr__(self) -> str:
        return f"Dual(val={self.val!r}, grad={self.grad!r}, order={self.order})"

    # -- unary chain rule -------------------------------------------------
    def _chain(self, f0, f1, f2=None) -> "Dual":
        grad = _col(f1, 1) * self.grad
        hess = None
        if self.hess is not None:
            hess = _col(f1, 2) * self.hess + _col(f2, 2) * _outer(self.grad, self.grad)
        return Dual(f0, grad, hess)

    def __neg__(self) -> "Dual":
        return Dual(-self.val, -self.grad, None if self.hess is None else -self.hess)

    def __pos__(self) -> "Dual":
        return self

    # -- binary arithmetic ------------------------------------------------
    def __add__(self, other) -> "Dual":
        if isinstance(other, Dual):
            hess = None
            if self.hess is not None and other.hess is not None:
                hess = self.hess + other.hess
            return Dual(self.val + other.val, self.grad + other.grad, hess)
        val = self.val + _real(other)
        grad = np.broadcast_to(self.grad, val.shape + self.grad.shape[-1:])
        hess = None
        if self.hess is not None:
            hess = np.broadcast_to(self.hess, val.shape + self.hess.shape[-2:])
        return Dual(val, grad, hess)

    __radd__ = __add__

    def __sub__(self, other) -> "Dual":
        return self + (-other)

    def __rsub__(self, other) -> "Dual":
        return (-self) + other

    def __mul__(self, other) -> "Dual":
        if isinstance(other, Dual):
            a, b = self, other
            grad = a.grad * _col(b.val, 1) + b.grad * _col(a.val, 1)
            hess = None
            if a.hess is not None and b.hess is not None:
                hess = (
                    a.hess * _col(b.val, 2)
                    + b.hess * _col(a.val, 2)
                    + _outer(a.grad, b.grad)
                    + _outer(b.grad, a.grad)
                )
            return Dual(a.val * b.val, grad, hess)
        k = _real(other)
        hess = None if self.hess is None else self.hess * _col(k, 2)
        return Dual(self.val * k, self.grad * _col(k, 1), hess)

    __rmul__ = __mul__

    def reciprocal(self) -> "Dual":
        v = self.val
        return self._chain(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other) -> "Dual":
        if isinstance(other, Dual):
            return self * other.reciprocal()
        return self * (1.0 / _real(other))

    def __rtruediv__(self, other) -> "Dual":
        return self.reciprocal() * other

    def __pow__(self, a) -> "Dual":
        if isinstance(a, Dual):
            raise TypeError("Dual exponents are not supported")
        v = self.val
        if a == 0:
            return self._chain(np.ones_like(v), np.zeros_like(v), np.zeros_like(v))
        return self._chain(v**a, a * v ** (a - 1), a * (a - 1) * v ** (a - 2))

    def sqrt(self) -> "Dual":
        s = np.sqrt(self.val)
        return self._chain(s, 0.5 / s, -0.25 / (s * self.val))


def sqrt(x):
    """Square root that dispatches on :class:`Dual` inputs."""
    if isinstance(x, Dual):
        return x.sqrt()
    return np.sqrt(x)


def value_of(x):
    """Strip derivative information, returning the plain value."""
    return x.val if isinstance(x, Dual) else x


def seed_variables(values, order: int = 1) -> list[Dual]:
    """Wrap the ``k`` leading entries of ``values`` as independent variables.

    ``values`` has shape ``(k,)`` or ``(k, S)`` for ``S`` batched samples.
    """
    values = np.asarray(values, dtype=float)
    k = values.shape[0]
    batch = values.shape[1:]
    eye = np.eye(k)
    out = []
    for i in range(k):
        grad = np.broadcast_to(eye[i], batch + (k,))
        hess = np.zeros(batch + (k, k)) if order == 2 else None
        out.append(Dual(values[i], grad, hess))
    return out
