"""Geometry of the finite-dimensional lp space and its dual.

All points are plain float arrays; an ``LpSpace`` carries the dimension
and the exponent and provides norms, the pairing, the normalized duality
map J and its inverse, the Lyapunov functional phi, and convex
combinations taken in dual coordinates.

J has the closed form  (Jx)_i = ||x||_p^{2-p} |x_i|^{p-1} sign(x_i),
with J0 = 0; the inverse is the same formula on the dual space with the
conjugate exponent q = p / (p - 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

P_MIN = 1.1
P_MAX = 10.0


class DimensionMismatchError(ValueError):
    pass


def _as_finite_array(x, dim: int) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.shape != (dim,):
        raise DimensionMismatchError(
            f"expected a vector of length {dim}, got shape {a.shape}"
        )
    if not np.all(np.isfinite(a)):
        raise ValueError("vector has non-finite coordinates")
    return a


def _power_norm(x: np.ndarray, exponent: float) -> float:
    # rescale by the max coordinate so large exponents cannot overflow
    m = float(np.max(np.abs(x), initial=0.0))
    if m == 0.0:
        return 0.0
    return m * float(np.sum(np.abs(x / m) ** exponent)) ** (1.0 / exponent)


def _signed_power(x: np.ndarray, exponent: float) -> np.ndarray:
    # |x_i|^e * sign(x_i) with the 0^e := 0 convention, also for e < 1
    out = np.zeros_like(x)
    nz = x != 0.0
    out[nz] = np.abs(x[nz]) ** exponent * np.sign(x[nz])
    return out


@dataclass(frozen=True)
class LpSpace:
    """R^dim with the p-norm; smooth and uniformly convex for p in (1, inf)."""

    dim: int
    p: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")
        if not (P_MIN <= self.p <= P_MAX):
            raise ValueError(
                f"exponent must lie in [{P_MIN}, {P_MAX}], got {self.p}"
            )

    @property
    def q(self) -> float:
        """Conjugate exponent, 1/p + 1/q = 1."""
        return self.p / (self.p - 1.0)

    def check(self, x) -> np.ndarray:
        return _as_finite_array(x, self.dim)

    # --- norms and pairing -------------------------------------------------

    def norm(self, x) -> float:
        return _power_norm(self.check(x), self.p)

    def dual_norm(self, xstar) -> float:
        return _power_norm(self.check(xstar), self.q)

    def pairing(self, x, xstar) -> float:
        return float(np.dot(self.check(x), self.check(xstar)))

    # --- duality maps ------------------------------------------------------

    def duality_map(self, x) -> np.ndarray:
        """J: <x, Jx> = ||x||^2 and ||Jx||_q = ||x||_p; identity for p = 2."""
        x = self.check(x)
        nx = _power_norm(x, self.p)
        if nx == 0.0:
            return np.zeros(self.dim)
        # Jx = nx * (|x|/nx)^{p-1} sign(x): every factor is scale-safe
        return nx * _signed_power(x / nx, self.p - 1.0)

    def inverse_duality_map(self, xstar) -> np.ndarray:
        """J^{-1}, the duality map of the dual space (exponent q)."""
        xstar = self.check(xstar)
        ns = _power_norm(xstar, self.q)
        if ns == 0.0:
            return np.zeros(self.dim)
        return ns * _signed_power(xstar / ns, self.q - 1.0)

    # --- Lyapunov functional ----------------------------------------------

    def lyapunov(self, x, y) -> float:
        """phi(x, y) = ||x||^2 - 2<x, Jy> + ||y||^2 >= (||x|| - ||y||)^2."""
        x = self.check(x)
        y = self.check(y)
        nx = _power_norm(x, self.p)
        ny = _power_norm(y, self.p)
        v = nx * nx - 2.0 * float(np.dot(x, self.duality_map(y))) + ny * ny
        # exact nonnegativity can be lost to rounding near x == y
        return max(v, 0.0)

    def dual_convex_combination(self, lam: float, x, y) -> np.ndarray:
        """J^{-1}(lam*Jx + (1-lam)*Jy); ordinary convex combination at p = 2."""
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"combination weight must lie in [0, 1], got {lam}")
        x = self.check(x)
        y = self.check(y)
        if lam == 1.0:
            return x.copy()
        if lam == 0.0:
            return y.copy()
        return self.inverse_duality_map(
            lam * self.duality_map(x) + (1.0 - lam) * self.duality_map(y)
        )
