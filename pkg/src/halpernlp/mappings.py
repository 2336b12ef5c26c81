"""Quasi-nonexpansive building blocks and mapping sequences for the drivers.

A mapping here is "of type (r)": it has fixed points and never increases
the Lyapunov distance phi(p, .) to any of them.  Implemented variants
are resolvents, generalized projections, and the dual-coordinate blend
S = J^{-1}(beta J + (1 - beta) J T).  Sequences of such mappings (with a
common fixed-point set) are what the iteration drivers consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import LpSpace
from .operators import MonotoneOperator, resolvent
from .sets import AffineSet, ConvexSet, generalized_projection
from .schedules import Schedule, validate_blend_weights, validate_resolvent_radii
from . import tolerances


@dataclass
class ApplyResult:
    point: np.ndarray
    converged: bool
    inner_iterations: int


class Mapping:
    def apply(self, space: LpSpace, x, warm=None) -> ApplyResult:
        raise NotImplementedError

    def fixed_point_reference(self, space: LpSpace):
        """A known fixed point, or an AffineSet of them."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class ResolventMap(Mapping):
    op: MonotoneOperator
    r: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("resolvent parameter must be positive")

    def apply(self, space, x, warm=None):
        res = resolvent(space, self.op, self.r, x, z0=warm)
        return ApplyResult(res.point, res.converged, res.inner_iterations)

    def fixed_point_reference(self, space):
        return self.op.zero_set(space)


@dataclass(frozen=True, eq=False)
class ProjectionMap(Mapping):
    cset: ConvexSet

    def apply(self, space, x, warm=None):
        res = generalized_projection(space, self.cset, x)
        return ApplyResult(res.point, res.converged, res.inner_iterations)

    def fixed_point_reference(self, space):
        # any point of C is fixed; the Euclidean projection of 0 is canonical
        return self.cset.euclidean_project(np.zeros(space.dim))


@dataclass(frozen=True, eq=False)
class BlendMap(Mapping):
    """S = J^{-1}(beta J + (1 - beta) J T); F(S) = F(T) for beta < 1."""

    inner: Mapping
    beta: float

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("blend weight must lie in [0, 1]")

    def apply(self, space, x, warm=None):
        if self.beta == 1.0:
            return ApplyResult(space.check(x).copy(), True, 0)
        tx = self.inner.apply(space, x, warm=warm)
        return ApplyResult(
            space.dual_convex_combination(self.beta, x, tx.point),
            tx.converged,
            tx.inner_iterations,
        )

    def fixed_point_reference(self, space):
        return self.inner.fixed_point_reference(space)


class MappingSequence:
    def at(self, n: int) -> Mapping:
        raise NotImplementedError

    def fixed_point_reference(self, space: LpSpace):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class ResolventSequence(MappingSequence):
    """S_n = L_{r_n}; common fixed points are the operator's zeros."""

    op: MonotoneOperator
    r_schedule: Schedule

    def __post_init__(self):
        validate_resolvent_radii(self.r_schedule)

    def at(self, n):
        return ResolventMap(self.op, self.r_schedule(n))

    def fixed_point_reference(self, space):
        return self.op.zero_set(space)


@dataclass(frozen=True, eq=False)
class BlendSequence(MappingSequence):
    """S_n = J^{-1}(beta_n J + (1 - beta_n) J T); common fixed points F(T)."""

    inner: Mapping
    beta_schedule: Schedule

    def __post_init__(self):
        _, lo, hi = validate_blend_weights(self.beta_schedule)
        object.__setattr__(self, "beta_lo", lo)
        object.__setattr__(self, "beta_hi", hi)

    def at(self, n):
        return BlendMap(self.inner, self.beta_schedule(n))

    def fixed_point_reference(self, space):
        return self.inner.fixed_point_reference(space)


def apply_indexed(space: LpSpace, seq: MappingSequence, n: int, x, warm=None):
    if n < 1:
        raise ValueError("sequence indices are 1-based")
    return seq.at(n).apply(space, x, warm=warm)


@dataclass
class SrnsReport:
    """Finite-sample diagnostic of the strong relative nonexpansiveness
    implication: d_n -> 0 must force e_n -> 0."""

    d: np.ndarray  # phi(p, x_n) - phi(p, S_n x_n)
    e: np.ndarray  # phi(S_n x_n, x_n)
    flagged: bool


def srns_diagnostic(
    space: LpSpace,
    seq: MappingSequence,
    xs,
    p_hat,
    eps_d: float = 1e-6,
    eps_e: float = 1e-3,
) -> SrnsReport:
    p_hat = space.check(p_hat)
    d = np.empty(len(xs))
    e = np.empty(len(xs))
    for i, x in enumerate(xs):
        sx = apply_indexed(space, seq, i + 1, x).point
        d[i] = space.lyapunov(p_hat, x) - space.lyapunov(p_hat, sx)
        e[i] = space.lyapunov(sx, x)
    # flag only when the implication's premise is met but the conclusion fails
    flagged = bool(len(xs) > 0 and np.max(d) < eps_d and np.min(e) > eps_e)
    return SrnsReport(d, e, flagged)


def reference_points(space: LpSpace, ref, rng=None, count: int = 5):
    """Materialize a fixed-point reference as a list of concrete points."""
    if isinstance(ref, AffineSet):
        pts = [ref.point.copy()]
        if rng is None:
            rng = np.random.default_rng(0)
        k = ref.directions.shape[0]
        for _ in range(count - 1):
            pts.append(ref.point + rng.standard_normal(k) @ ref.directions)
        return pts
    return [space.check(ref)]
