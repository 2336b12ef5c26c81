"""The three anchored iteration schemes with per-step invariant monitoring.

One generic loop drives all three:

    y_n     = J^{-1}(alpha_n J u + (1 - alpha_n) J S_n x_n)
    x_{n+1} = Q_C(y_n)

with S_n a resolvent sequence (proximal-point scheme, C the whole
space), a blend sequence (Halpern-Mann scheme), or any mapping sequence
with a common fixed point (generic scheme).  The limit is the
generalized projection of the anchor u onto the common fixed-point set.

Each step records the two theorem-bearing inequality slacks

    (b)  alpha_n phi(w,u) + phi(w,S_n x_n) - phi(w,x_{n+1}) >= 0
    (c)  (1-alpha_n) phi(w,x_n) + 2 alpha_n <y_n - w, Ju - Jw>
           - phi(w,x_{n+1}) >= 0

and the boundedness bound phi(w,x_n) <= max{phi(w,x_1), phi(w,u)}.
Violations beyond tolerance indicate implementation bugs, not bad luck.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import LpSpace
from .mappings import (
    BlendMap,
    BlendSequence,
    MappingSequence,
    ResolventSequence,
)
from .schedules import Schedule, validate_anchor_weights
from .sets import AffineSet, ConvexSet, WholeSpace, generalized_projection
from . import tolerances


class RunStatus(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    INNER_SOLVER_FAILURE = "InnerSolverFailure"


def reference_solution(
    space: LpSpace, fixed_set, u, rng: np.random.Generator | None = None
) -> np.ndarray:
    """w = Q_F(u) for F a known point or affine set of fixed points."""
    u = space.check(u)
    if isinstance(fixed_set, AffineSet):
        res = generalized_projection(space, fixed_set, u, rng=rng)
        if not res.converged:
            raise RuntimeError(
                "generalized projection onto the fixed-point set did not "
                f"converge (VI residual {res.vi_residual:.3e})"
            )
        return res.point
    if isinstance(fixed_set, np.ndarray) or np.ndim(fixed_set) == 1:
        return space.check(fixed_set)
    raise ValueError(
        f"unsupported fixed-point description: {type(fixed_set).__name__}"
    )


@dataclass(frozen=True, eq=False)
class HalpernConfig:
    space: LpSpace
    anchor: np.ndarray  # u
    start: np.ndarray  # x_1, must lie in C
    constraint: ConvexSet
    sequence: MappingSequence
    alpha: Schedule
    max_iter: int = 1_000_000
    stop_tol: float = 1e-3
    reference: np.ndarray | None = None  # w = Q_F(u); computed when omitted
    membership_tol: float = tolerances.MEMBERSHIP_TOL
    # test hook: additive corruption of the dual blend, used to exercise
    # slack-violation detection paths; leave at 0 for honest runs
    perturb_step: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "anchor", self.space.check(self.anchor))
        object.__setattr__(self, "start", self.space.check(self.start))
        validate_anchor_weights(self.alpha)
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.stop_tol <= 0:
            raise ValueError("stop_tol must be positive")
        if not self.constraint.contains(self.start, self.membership_tol):
            raise ValueError("x_1 must lie in the constraint set")
        if self.reference is None:
            w = reference_solution(
                self.space,
                self.sequence.fixed_point_reference(self.space),
                self.anchor,
            )
            object.__setattr__(self, "reference", w)
        else:
            object.__setattr__(self, "reference", self.space.check(self.reference))


@dataclass
class IterationTrace:
    status: RunStatus
    iterations: int
    final_x: np.ndarray
    reference: np.ndarray
    n: np.ndarray
    alpha: np.ndarray
    phi_w_x: np.ndarray  # phi(w, x_n)
    res_fixed_point: np.ndarray  # ||x_n - S_n x_n||_p
    res_y_vs_sx: np.ndarray  # ||y_n - S_n x_n||_p
    slack_b: np.ndarray
    slack_c: np.ndarray
    inner_iters: np.ndarray
    uc_ft_gap: np.ndarray | None  # blend-scheme convexity gap, when applicable
    snapshots: list  # (n, x_n) down-sampled full iterates
    boundedness_violation: float  # max over steps of phi(w,x_n) - bound
    final_error: float = math.inf  # ||x_final - w||_p
    final_phi: float = math.inf  # phi(w, x_final)
    uc_ft_flagged: bool = False

    @property
    def min_slack(self) -> float:
        if not self.slack_b.size:
            return math.inf
        return float(min(np.min(self.slack_b), np.min(self.slack_c)))


def _uc_ft_gap(space: LpSpace, beta: float, jx, jtx, jsx) -> float:
    """beta ||Jx||^2 + (1-beta) ||JTx||^2 - ||J S x||^2, in dual norms."""
    return (
        beta * space.dual_norm(jx) ** 2
        + (1.0 - beta) * space.dual_norm(jtx) ** 2
        - space.dual_norm(jsx) ** 2
    )


def halpern_step(cfg: HalpernConfig, n: int, x: np.ndarray, warm=None):
    """One step of the scheme; returns (x_next, y, diagnostics dict)."""
    space = cfg.space
    w = cfg.reference
    a = cfg.alpha(n)
    mapping = cfg.sequence.at(n)
    applied = mapping.apply(space, x, warm=warm)
    sx = applied.point
    ju = space.duality_map(cfg.anchor)
    jsx = space.duality_map(sx)
    jy = a * ju + (1.0 - a) * jsx
    y = space.inverse_duality_map(jy)
    if cfg.perturb_step:
        y = y + cfg.perturb_step
    if isinstance(cfg.constraint, WholeSpace):
        x_next = y
        proj_converged, proj_iters = True, 0
    elif cfg.constraint.contains(y, 0.0):
        x_next = y
        proj_converged, proj_iters = True, 0
    else:
        proj = generalized_projection(space, cfg.constraint, y)
        x_next = proj.point
        proj_converged, proj_iters = proj.converged, proj.inner_iterations

    jw = space.duality_map(w)
    phi_w_xn = space.lyapunov(w, x)
    phi_w_next = space.lyapunov(w, x_next)
    slack_b = a * space.lyapunov(w, cfg.anchor) + space.lyapunov(w, sx) - phi_w_next
    slack_c = (
        (1.0 - a) * phi_w_xn
        + 2.0 * a * float(np.dot(y - w, ju - jw))
        - phi_w_next
    )

    diag = {
        "alpha": a,
        "sx": sx,
        "phi_w_x": phi_w_xn,
        "res_fixed_point": space.norm(x - sx),
        "res_y_vs_sx": space.norm(y - sx),
        "slack_b": slack_b,
        "slack_c": slack_c,
        "inner_iters": applied.inner_iterations + proj_iters,
        "inner_converged": applied.converged and proj_converged,
    }
    if isinstance(mapping, BlendMap) and mapping.beta < 1.0:
        jx = space.duality_map(x)
        beta = mapping.beta
        jtx = (jsx - beta * jx) / (1.0 - beta)  # recover J(Tx) from the blend
        diag["uc_ft_gap"] = _uc_ft_gap(space, beta, jx, jtx, jsx)
        diag["j_gap"] = space.dual_norm(jx - jtx)
    return x_next, y, diag


def run_halpern(cfg: HalpernConfig) -> IterationTrace:
    space = cfg.space
    w = cfg.reference
    bound = max(space.lyapunov(w, cfg.start), space.lyapunov(w, cfg.anchor))

    cols = {
        k: []
        for k in (
            "n",
            "alpha",
            "phi_w_x",
            "res_fixed_point",
            "res_y_vs_sx",
            "slack_b",
            "slack_c",
            "inner_iters",
        )
    }
    uc_gaps: list[float] = []
    j_gaps: list[float] = []
    snapshots = []
    stride = max(1, math.ceil(cfg.max_iter / 1000))
    is_blend = isinstance(cfg.sequence, BlendSequence)

    x = cfg.start.copy()
    warm = None
    status = RunStatus.MAX_ITER
    bound_violation = -math.inf
    n_done = 0
    for n in range(1, cfg.max_iter + 1):
        x_next, y, diag = halpern_step(cfg, n, x, warm=warm)
        warm = diag["sx"]
        cols["n"].append(n)
        for k in (
            "alpha",
            "phi_w_x",
            "res_fixed_point",
            "res_y_vs_sx",
            "slack_b",
            "slack_c",
            "inner_iters",
        ):
            cols[k].append(diag[k])
        if "uc_ft_gap" in diag:
            uc_gaps.append(diag["uc_ft_gap"])
            j_gaps.append(diag["j_gap"])
        if n % stride == 0 or n == 1:
            snapshots.append((n, x.copy()))
        bound_violation = max(bound_violation, diag["phi_w_x"] - bound)
        n_done = n
        if not diag["inner_converged"]:
            x = x_next
            status = RunStatus.INNER_SOLVER_FAILURE
            break
        x = x_next
        if space.norm(x - w) <= cfg.stop_tol:
            status = RunStatus.CONVERGED
            break

    uc_flagged = False
    if is_blend and uc_gaps:
        lo = getattr(cfg.sequence, "beta_lo")
        hi = getattr(cfg.sequence, "beta_hi")
        if lo * (1.0 - hi) > 0:
            tail = max(1, len(uc_gaps) // 10)
            for g, jg in zip(uc_gaps[-tail:], j_gaps[-tail:]):
                if g < 1e-8 and jg > 1e-3:
                    uc_flagged = True
                    break

    trace = IterationTrace(
        status=status,
        iterations=n_done,
        final_x=x,
        reference=w,
        n=np.asarray(cols["n"], dtype=int),
        alpha=np.asarray(cols["alpha"]),
        phi_w_x=np.asarray(cols["phi_w_x"]),
        res_fixed_point=np.asarray(cols["res_fixed_point"]),
        res_y_vs_sx=np.asarray(cols["res_y_vs_sx"]),
        slack_b=np.asarray(cols["slack_b"]),
        slack_c=np.asarray(cols["slack_c"]),
        inner_iters=np.asarray(cols["inner_iters"], dtype=int),
        uc_ft_gap=np.asarray(uc_gaps) if uc_gaps else None,
        snapshots=snapshots,
        boundedness_violation=bound_violation,
        final_error=space.norm(x - w),
        final_phi=space.lyapunov(w, x),
        uc_ft_flagged=uc_flagged,
    )
    return trace


def run_proximal_point(cfg: HalpernConfig) -> IterationTrace:
    """The proximal-point specialization: resolvent sequence, no constraint."""
    if not isinstance(cfg.sequence, ResolventSequence):
        raise ValueError("proximal-point runs need a resolvent sequence")
    if not isinstance(cfg.constraint, WholeSpace):
        raise ValueError("proximal-point runs use the whole space as constraint")
    return run_halpern(cfg)


def run_halpern_mann(cfg: HalpernConfig) -> IterationTrace:
    """The blend specialization S_n = J^{-1}(beta_n J + (1-beta_n) J T)."""
    if not isinstance(cfg.sequence, BlendSequence):
        raise ValueError("Halpern-Mann runs need a blend sequence")
    return run_halpern(cfg)
