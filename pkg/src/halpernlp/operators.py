"""Maximal monotone operators on the lp space with computable resolvents.

Every implemented variant is a single-valued continuous monotone map
defined on the whole space (hence maximal).  The resolvent
L_r = (J + rA)^{-1} J solves J z + r A z = J x; linear cases at p = 2
use a direct solve, the duality-residual variant has a closed form, and
the rest use a damped Newton iteration on the residual with analytic
Jacobians and Levenberg regularization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import LpSpace, _power_norm, _signed_power
from .sets import AffineSet
from . import tolerances

_NEWTON_MAX_ITER = 200
_NEWTON_GRAD_TOL = 1e-11

PSD_EIG_TOL = -1e-10


def _check_psd(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    sym = 0.5 * (m + m.T)
    if float(np.min(np.linalg.eigvalsh(sym))) < PSD_EIG_TOL:
        raise ValueError(f"{name} is not positive semidefinite")
    return m


class MonotoneOperator:
    """Single-valued maximal monotone map of the space into its dual."""

    def evaluate(self, space: LpSpace, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, space: LpSpace, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def zero_set(self, space: LpSpace):
        """A^{-1}0 as a point or an AffineSet; raises if empty."""
        raise NotImplementedError


def _affine_zero_set(m: np.ndarray, rhs: np.ndarray):
    """Solution set of m @ x = rhs: a point, an AffineSet, or None if empty."""
    sol, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    if not np.allclose(m @ sol, rhs, atol=1e-8):
        return None
    u, s, vt = np.linalg.svd(m)
    null = vt[s <= 1e-12 * max(float(s[0]), 1.0)] if s.size else vt
    if null.shape[0] == 0:
        return sol
    return AffineSet(point=sol, directions=null)


@dataclass(frozen=True, eq=False)
class LinearMonotone(MonotoneOperator):
    """A(x) = M x + b with M positive semidefinite (not necessarily symmetric)."""

    m: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m", _check_psd(self.m, "M"))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))

    def evaluate(self, space, x):
        return self.m @ space.check(x) + self.b

    def jacobian(self, space, x):
        return self.m

    def zero_set(self, space):
        zs = _affine_zero_set(self.m, -self.b)
        if zs is None:
            raise ValueError("operator has no zero: M x = -b is inconsistent")
        return zs


@dataclass(frozen=True, eq=False)
class DualityResidual(MonotoneOperator):
    """A(x) = Jx - Jz; monotone because J is, with unique zero z."""

    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))

    def evaluate(self, space, x):
        return space.duality_map(x) - space.duality_map(self.z)

    def jacobian(self, space, x):
        return duality_map_jacobian(space, x)

    def zero_set(self, space):
        return self.z.copy()


@dataclass(frozen=True, eq=False)
class GradientOfQuadratic(MonotoneOperator):
    """A(x) = Q x - c, the gradient of (1/2) x'Qx - c'x with Q symmetric PSD."""

    q: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        q = _check_psd(self.q, "Q")
        if not np.allclose(q, q.T, atol=1e-12):
            raise ValueError("Q must be symmetric")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))

    def evaluate(self, space, x):
        return self.q @ space.check(x) - self.c

    def jacobian(self, space, x):
        return self.q

    def zero_set(self, space):
        zs = _affine_zero_set(self.q, self.c)
        if zs is None:
            raise ValueError("operator has no zero: Q x = c is inconsistent")
        return zs


def duality_map_jacobian(space: LpSpace, x: np.ndarray) -> np.ndarray:
    """dJ/dx = (2-p) s^{2-2p} u u' + (p-1) s^{2-p} diag(|x_i|^{p-2}),
    where s = ||x||_p and u_i = |x_i|^{p-1} sign(x_i); PSD since J is monotone.
    """
    p = space.p
    x = np.asarray(x, dtype=float)
    if p == 2.0:
        return np.eye(space.dim)
    s = _power_norm(x, p)
    if s == 0.0:
        # J is differentiable at 0 only for p < 2 (with dJ = 0 limit direction
        # issues); return a small multiple of I as a usable Newton model
        return 1e-8 * np.eye(space.dim)
    u = _signed_power(x, p - 1.0)
    ax = np.abs(x)
    # clip the diagonal to keep the Newton model finite for p < 2 at zeros
    diag = np.where(ax > 0, ax ** (p - 2.0), 0.0)
    diag = np.minimum(diag, 1e12)
    return (2.0 - p) * s ** (2.0 - 2.0 * p) * np.outer(u, u) + (
        p - 1.0
    ) * s ** (2.0 - p) * np.diag(diag)


@dataclass
class ResolventResult:
    point: np.ndarray
    residual: float  # ||J(point) + r A(point) - J(x)||_q
    inner_iterations: int
    converged: bool


def resolvent(
    space: LpSpace,
    op: MonotoneOperator,
    r: float,
    x,
    z0=None,
    tol: float = tolerances.RESOLVENT_TOL,
) -> ResolventResult:
    """L_r(x) = (J + rA)^{-1} J x."""
    if r <= 0:
        raise ValueError(f"resolvent parameter must be positive, got {r}")
    x = space.check(x)
    jx = space.duality_map(x)

    if isinstance(op, DualityResidual):
        # Jz + r(Jz - Jz0) = Jx  =>  Jz = (Jx + r Jz0) / (1 + r)
        point = space.inverse_duality_map(
            (jx + r * space.duality_map(op.z)) / (1.0 + r)
        )
        res = _resolvent_residual(space, op, r, point, jx)
        return ResolventResult(point, res, 0, res <= tol)

    if space.p == 2.0 and isinstance(op, (LinearMonotone, GradientOfQuadratic)):
        # (I + rB) z = x - r b0 with A z = B z + b0
        if isinstance(op, LinearMonotone):
            bmat, b0 = op.m, op.b
        else:
            bmat, b0 = op.q, -op.c
        point = np.linalg.solve(np.eye(space.dim) + r * bmat, x - r * b0)
        res = _resolvent_residual(space, op, r, point, jx)
        return ResolventResult(point, res, 0, res <= tol)

    return _newton_resolvent(space, op, r, x, jx, z0, tol)


def _resolvent_residual(space, op, r, z, jx) -> float:
    g = space.duality_map(z) + r * op.evaluate(space, z) - jx
    return _power_norm(g, space.q)


def _newton_resolvent(space, op, r, x, jx, z0, tol) -> ResolventResult:
    z = np.asarray(z0, dtype=float).copy() if z0 is not None else x.copy()
    if not np.any(z):
        # nudge off the origin where the Jacobian of J degenerates
        z = z + 1e-6

    def g_of(zz):
        return space.duality_map(zz) + r * op.evaluate(space, zz) - jx

    g = g_of(z)
    gnorm = float(np.linalg.norm(g))
    lam = 0.0
    best = (z.copy(), _power_norm(g, space.q))
    for k in range(1, _NEWTON_MAX_ITER + 1):
        if _power_norm(g, space.q) <= _NEWTON_GRAD_TOL:
            break
        jac = duality_map_jacobian(space, z) + r * op.jacobian(space, z)
        if lam > 0.0:
            jac = jac + lam * np.eye(space.dim)
        try:
            dz = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError:
            lam = max(2.0 * lam, 1e-8)
            continue
        step = 1.0
        accepted = False
        for _ in range(60):
            cand = z + step * dz
            gc = g_of(cand)
            gcn = float(np.linalg.norm(gc))
            if gcn < gnorm * (1.0 - 1e-4 * step):
                z, g, gnorm = cand, gc, gcn
                accepted = True
                break
            step *= 0.5
        if accepted:
            lam *= 0.25
            q_res = _power_norm(g, space.q)
            if q_res < best[1]:
                best = (z.copy(), q_res)
        else:
            lam = max(4.0 * lam, 1e-8)
            if lam > 1e12:
                break
    res = _power_norm(g_of(z), space.q)
    if res > best[1]:
        z, res = best
    return ResolventResult(z, res, k, res <= tol)


def monotonicity_gap(space: LpSpace, op: MonotoneOperator, x, y) -> float:
    """<x - y, Ax - Ay>; nonnegative for monotone operators."""
    x = space.check(x)
    y = space.check(y)
    return float(np.dot(x - y, op.evaluate(space, x) - op.evaluate(space, y)))
