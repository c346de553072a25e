"""Inverse kinematics: pose-tracking and look-at objectives plus a solver.

Two objective families are provided. The dual-arm objective scores both
end-effectors against full pose targets: squared position error plus the
antipodal-aware quaternion displacement distance, summed over the arms.
The look-at objective drops the viewpoint orientation target and instead
scores how well the camera's local z ray passes through a visual target
point (a fixed offset from the manipulation end-effector), plus a
levelling term on the camera's local y axis.

Position terms (m^2) and rotation terms (rad^2, half-angle convention)
are summed unweighted.

The solver is a projected-gradient quasi-Newton descent (L-BFGS-style
curvature memory, backtracking line search along the projected path)
with central finite-difference gradients. Iterates stay inside the joint
box limits at all times, accepted steps strictly decrease the objective,
and the whole procedure is deterministic for identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .kinematics import (
    Pose,
    _chain_prefixes,
    _chain_state,
    _chain_state_from,
)
from .robot_model import JointConfig, RobotModel, clamp_to_limits, joint_config
from .rotations import UnitQuaternion

# Accepted steps improving the objective by less than this count toward a
# stall: the solve has hit numerical precision and is reported converged.
# A single tiny step can just be a poor search direction, so the stall
# must persist for a few consecutive iterations.
_STALL_IMPROVEMENT = 1e-12
_STALL_PERSISTENCE = 3
_CURVATURE_MIN = 1e-12
_ARMIJO_C1 = 1e-4
_MAX_BACKTRACKS = 60
_MEMORY = 8


@dataclass(frozen=True)
class DualArmTarget:
    """Full pose targets for both end-effectors."""

    manipulation_position: np.ndarray
    manipulation_orientation: UnitQuaternion
    viewpoint_position: np.ndarray
    viewpoint_orientation: UnitQuaternion

    def __post_init__(self):
        for name in ("manipulation_position", "viewpoint_position"):
            v = np.asarray(getattr(self, name), dtype=float).reshape(3)
            if not np.all(np.isfinite(v)):
                raise ValueError(f"non-finite {name}")
            v.setflags(write=False)
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class LookAtTarget:
    """Manipulation pose target plus viewpoint position; the viewpoint
    orientation is left to the look-at objective."""

    manipulation_position: np.ndarray
    manipulation_orientation: UnitQuaternion
    viewpoint_position: np.ndarray

    def __post_init__(self):
        for name in ("manipulation_position", "viewpoint_position"):
            v = np.asarray(getattr(self, name), dtype=float).reshape(3)
            if not np.all(np.isfinite(v)):
                raise ValueError(f"non-finite {name}")
            v.setflags(write=False)
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class LookAtParams:
    """Geometry of the look-at objective.

    ``delta`` is the length (meters) of the camera-axis ray used for the
    segment projection; ``target_offset`` displaces the visual target
    from the current manipulation end-effector position.
    """

    delta: float = 999.0
    target_offset: np.ndarray = (0.0, 0.0, 0.15)

    def __post_init__(self):
        if not (self.delta > 0.0):
            raise ValueError("delta must be positive")
        off = np.asarray(self.target_offset, dtype=float).reshape(3)
        off.setflags(write=False)
        object.__setattr__(self, "target_offset", off)


@dataclass(frozen=True)
class SolveOptions:
    objective_tolerance: float = 1e-8
    max_iterations: int = 200
    finite_difference_step: float = 1e-6
    seed_config: JointConfig | None = None

    def __post_init__(self):
        if not (self.objective_tolerance > 0.0):
            raise ValueError("objective_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not (self.finite_difference_step > 0.0):
            raise ValueError("finite_difference_step must be positive")


@dataclass(frozen=True)
class IKResult:
    config: JointConfig
    objective_value: float
    iterations: int
    converged: bool


# ---------------------------------------------------------------------------
# Scalar objective cores (shared by the public functions and the solver so
# both report bit-identical values).
# ---------------------------------------------------------------------------


def _pos_err_sq(p, t):
    dx = p[0] - t[0]
    dy = p[1] - t[1]
    dz = p[2] - t[2]
    return dx * dx + dy * dy + dz * dz


def _rot_err_sq(q, t):
    # Squared log-norm of the relative quaternion; |w| canonicalizes the
    # antipodal pair, so this is the min over both signs. Vector terms
    # are grouped to cancel exactly when q = +/- t.
    a0, a1, a2, a3 = q[0], -q[1], -q[2], -q[3]
    b0, b1, b2, b3 = t
    w = a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3
    x = (a0 * b1 + a1 * b0) + (a2 * b3 - a3 * b2)
    y = (a0 * b2 + a2 * b0) + (a3 * b1 - a1 * b3)
    z = (a0 * b3 + a3 * b0) + (a1 * b2 - a2 * b1)
    half_angle = math.atan2(math.sqrt(x * x + y * y + z * z), abs(w))
    return half_angle * half_angle


def _arm_term(state, target_p, target_q):
    p, q = state
    return _pos_err_sq(p, target_p) + _rot_err_sq(q, target_q)


def _frame_axes(q):
    """Local y and z axes (world frame) of a quaternion, as float tuples."""
    w, x, y, z = q
    w_y = (2.0 * (x * y - w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z + w * x))
    w_z = (2.0 * (x * z + w * y), 2.0 * (y * z - w * x), 1.0 - 2.0 * (x * x + y * y))
    return w_y, w_z


def _seg_dist_sq(pt, pv, pf):
    """Squared distance from pt to the segment [pv, pf] (scalar core)."""
    ux, uy, uz = pf[0] - pv[0], pf[1] - pv[1], pf[2] - pv[2]
    vx, vy, vz = pt[0] - pv[0], pt[1] - pv[1], pt[2] - pv[2]
    uu = ux * ux + uy * uy + uz * uz
    t = (vx * ux + vy * uy + vz * uz) / uu
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    rx = vx - t * ux
    ry = vy - t * uy
    rz = vz - t * uz
    return rx * rx + ry * ry + rz * rz


def _quat_tuple(q: UnitQuaternion):
    return (q.q0, q.q1, q.q2, q.q3)


def _vec_tuple(v):
    return (float(v[0]), float(v[1]), float(v[2]))


# ---------------------------------------------------------------------------
# Public objective functions
# ---------------------------------------------------------------------------


def single_arm_objective(
    pose: Pose, target_position, target_orientation: UnitQuaternion
) -> float:
    """Squared position error plus quaternion displacement distance."""
    state = (_vec_tuple(pose.position), _quat_tuple(pose.orientation))
    return _arm_term(state, _vec_tuple(target_position), _quat_tuple(target_orientation))


def dual_arm_objective(model: RobotModel, config: JointConfig, target: DualArmTarget) -> float:
    """Sum of the per-arm objectives at the configuration's FK poses."""
    return _DualArmProblem(model, target).value(config.values.tolist())


def clamped_projection(v, u) -> np.ndarray:
    """Project ``v`` onto ``u`` with the scalar parameter clamped to [0, 1]."""
    v = np.asarray(v, dtype=float).reshape(3)
    u = np.asarray(u, dtype=float).reshape(3)
    uu = float(u @ u)
    if uu == 0.0:
        raise ValueError("cannot project onto the zero vector")
    t = float(v @ u) / uu
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return t * u


def line_segment_projection(p_t, p_v, p_f) -> np.ndarray:
    """Closest point to ``p_t`` on the segment from ``p_v`` to ``p_f``."""
    p_t = np.asarray(p_t, dtype=float).reshape(3)
    p_v = np.asarray(p_v, dtype=float).reshape(3)
    p_f = np.asarray(p_f, dtype=float).reshape(3)
    return clamped_projection(p_t - p_v, p_f - p_v) + p_v


def viewpoint_orientation_loss(p_t, p_v, p_f) -> float:
    """Squared distance from the visual target to the camera-axis segment."""
    p_t = np.asarray(p_t, dtype=float).reshape(3)
    p_v = np.asarray(p_v, dtype=float).reshape(3)
    p_f = np.asarray(p_f, dtype=float).reshape(3)
    if float((p_f - p_v) @ (p_f - p_v)) == 0.0:
        raise ValueError("degenerate segment: p_f equals p_v")
    return _seg_dist_sq(_vec_tuple(p_t), _vec_tuple(p_v), _vec_tuple(p_f))


def viewpoint_stability_loss(w_y) -> float:
    """Squared vertical component of the camera's local y axis."""
    w_y = np.asarray(w_y, dtype=float).reshape(3)
    n = float(np.linalg.norm(w_y))
    if abs(n - 1.0) > 1e-6:
        raise ValueError(f"w_y must be a unit vector (norm {n!r})")
    return float(w_y[2]) ** 2


def lookat_objective(
    model: RobotModel,
    config: JointConfig,
    target: LookAtTarget,
    params: LookAtParams | None = None,
) -> float:
    """Manipulation pose error plus the viewpoint selection terms.

    The viewpoint part scores position against its target, the distance
    from the visual target to the camera z ray (length ``params.delta``),
    and the levelling of the camera's local y axis. The visual target is
    the current manipulation end-effector position plus
    ``params.target_offset``, recomputed at every call.
    """
    return _LookAtProblem(model, target, params or LookAtParams()).value(
        config.values.tolist()
    )


# ---------------------------------------------------------------------------
# Problem evaluators with chain-aware central differences
# ---------------------------------------------------------------------------


class _DualArmProblem:
    def __init__(self, model: RobotModel, target: DualArmTarget):
        self.model = model
        self.chain_m = model._chain_m
        self.chain_v = model._chain_v
        self.pm = _vec_tuple(target.manipulation_position)
        self.qm = _quat_tuple(target.manipulation_orientation)
        self.pv = _vec_tuple(target.viewpoint_position)
        self.qv = _quat_tuple(target.viewpoint_orientation)

    def value(self, values: list) -> float:
        sm = _chain_state(self.model, values, self.chain_m)
        sv = _chain_state(self.model, values, self.chain_v)
        return _arm_term(sm, self.pm, self.qm) + _arm_term(sv, self.pv, self.qv)

    def gradient(self, values: list, h: float) -> np.ndarray:
        g = np.zeros(len(values))
        inv = 0.5 / h
        for chain, target_p, target_q in (
            (self.chain_m, self.pm, self.qm),
            (self.chain_v, self.pv, self.qv),
        ):
            prefixes = _chain_prefixes(self.model, values, chain)
            for pos, idx in enumerate(chain):
                orig = values[idx]
                values[idx] = orig + h
                s_plus = _chain_state_from(self.model, values, chain, pos, prefixes[pos])
                values[idx] = orig - h
                s_minus = _chain_state_from(self.model, values, chain, pos, prefixes[pos])
                values[idx] = orig
                # The other chain's term is unchanged and cancels in the
                # central difference.
                g[idx] = (
                    _arm_term(s_plus, target_p, target_q)
                    - _arm_term(s_minus, target_p, target_q)
                ) * inv
        return g


class _LookAtProblem:
    def __init__(self, model: RobotModel, target: LookAtTarget, params: LookAtParams):
        self.model = model
        self.chain_m = model._chain_m
        self.chain_v = model._chain_v
        self.pm = _vec_tuple(target.manipulation_position)
        self.qm = _quat_tuple(target.manipulation_orientation)
        self.pv = _vec_tuple(target.viewpoint_position)
        self.delta = float(params.delta)
        self.offset = _vec_tuple(params.target_offset)

    def _view_terms(self, sv, pt):
        """Viewpoint position error + ray alignment + levelling, given the
        visual target point ``pt``."""
        pv, qv = sv
        w_y, w_z = _frame_axes(qv)
        d = self.delta
        pf = (pv[0] + d * w_z[0], pv[1] + d * w_z[1], pv[2] + d * w_z[2])
        return (
            _pos_err_sq(pv, self.pv)
            + _seg_dist_sq(pt, pv, pf)
            + w_y[2] * w_y[2]
        )

    def _target_point(self, sm):
        p = sm[0]
        return (p[0] + self.offset[0], p[1] + self.offset[1], p[2] + self.offset[2])

    def value(self, values: list) -> float:
        sm = _chain_state(self.model, values, self.chain_m)
        sv = _chain_state(self.model, values, self.chain_v)
        return _arm_term(sm, self.pm, self.qm) + self._view_terms(sv, self._target_point(sm))

    def gradient(self, values: list, h: float) -> np.ndarray:
        g = np.zeros(len(values))
        inv = 0.5 / h
        prefixes_m = _chain_prefixes(self.model, values, self.chain_m)
        prefixes_v = _chain_prefixes(self.model, values, self.chain_v)
        sv0 = prefixes_v[-1]
        sm0 = prefixes_m[-1]
        pv0, qv0 = sv0
        w_y0, w_z0 = _frame_axes(qv0)
        d = self.delta
        pf0 = (pv0[0] + d * w_z0[0], pv0[1] + d * w_z0[1], pv0[2] + d * w_z0[2])
        pt0 = self._target_point(sm0)

        # Manipulation joints move the arm pose and, through the visual
        # target point, the ray-alignment term; the viewpoint pose is fixed.
        for pos, idx in enumerate(self.chain_m):
            orig = values[idx]
            values[idx] = orig + h
            s_plus = _chain_state_from(self.model, values, self.chain_m, pos, prefixes_m[pos])
            values[idx] = orig - h
            s_minus = _chain_state_from(self.model, values, self.chain_m, pos, prefixes_m[pos])
            values[idx] = orig
            f_plus = _arm_term(s_plus, self.pm, self.qm) + _seg_dist_sq(
                self._target_point(s_plus), pv0, pf0
            )
            f_minus = _arm_term(s_minus, self.pm, self.qm) + _seg_dist_sq(
                self._target_point(s_minus), pv0, pf0
            )
            g[idx] = (f_plus - f_minus) * inv

        # Viewpoint joints move every viewpoint term; the visual target
        # point is fixed.
        for pos, idx in enumerate(self.chain_v):
            orig = values[idx]
            values[idx] = orig + h
            s_plus = _chain_state_from(self.model, values, self.chain_v, pos, prefixes_v[pos])
            values[idx] = orig - h
            s_minus = _chain_state_from(self.model, values, self.chain_v, pos, prefixes_v[pos])
            values[idx] = orig
            g[idx] = (self._view_terms(s_plus, pt0) - self._view_terms(s_minus, pt0)) * inv
        return g


# ---------------------------------------------------------------------------
# Box-constrained quasi-Newton descent
# ---------------------------------------------------------------------------


def _lbfgs_direction(g, history):
    if not history:
        return -g
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(history):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    s_last, y_last, _ = history[-1]
    q *= float(s_last @ y_last) / float(y_last @ y_last)
    for (s, y, rho), a in zip(history, reversed(alphas)):
        b = rho * float(y @ q)
        q += (a - b) * s
    return -q


def _minimize_box(problem, x0, lo, hi, options: SolveOptions):
    """Returns (x, objective, iterations, converged)."""
    tol = options.objective_tolerance
    h = options.finite_difference_step
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    f = problem.value(x.tolist())
    if f < tol:
        return x, f, 0, True
    g = problem.gradient(x.tolist(), h)
    history: list = []
    stalled = 0

    for it in range(1, options.max_iterations + 1):
        candidates = [_lbfgs_direction(g, history)]
        if history:
            candidates.append(-g)
        accepted = False
        for d in candidates:
            if float(d @ g) >= 0.0:
                continue
            alpha = 1.0
            for _ in range(_MAX_BACKTRACKS):
                xn = np.clip(x + alpha * d, lo, hi)
                step = xn - x
                if not step.any():
                    break
                fn = problem.value(xn.tolist())
                if fn < f and fn <= f + _ARMIJO_C1 * float(g @ step):
                    accepted = True
                    break
                alpha *= 0.5
            if accepted:
                break
        if not accepted:
            # No strictly improving feasible step exists along any
            # candidate direction: a (possibly constrained) stationary
            # point away from the tolerance target.
            return x, f, it, f < tol

        gn = problem.gradient(xn.tolist(), h)
        s = xn - x
        y = gn - g
        sy = float(s @ y)
        if sy > _CURVATURE_MIN * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            history.append((s, y, 1.0 / sy))
            if len(history) > _MEMORY:
                history.pop(0)
        improvement = f - fn
        x, f, g = xn, fn, gn
        if f < tol:
            return x, f, it, True
        stalled = stalled + 1 if improvement < _STALL_IMPROVEMENT else 0
        if stalled >= _STALL_PERSISTENCE:
            # Progress is below numerical resolution; treat as converged
            # to the achievable minimum.
            return x, f, it, True

    return x, f, options.max_iterations, f < tol


def _solve(problem, model: RobotModel, options: SolveOptions) -> IKResult:
    seed = options.seed_config
    if seed is None:
        seed = clamp_to_limits(model, np.zeros(model.dof))
    x0 = seed.values
    if x0.shape[0] != model.dof:
        raise ValueError(f"seed has {x0.shape[0]} values, model has {model.dof} joints")
    x, f, iters, converged = _minimize_box(
        problem, x0, model._limits_lo, model._limits_hi, options
    )
    return IKResult(
        config=joint_config(model, x),
        objective_value=float(f),
        iterations=iters,
        converged=bool(converged),
    )


def solve_dual_arm_ik(
    model: RobotModel, target: DualArmTarget, options: SolveOptions | None = None
) -> IKResult:
    """Locally minimize the dual-arm objective inside the joint limits.

    Non-convergence is reported through ``IKResult.converged``, never
    raised; the returned configuration always respects the limits and
    never scores worse than the seed.
    """
    return _solve(_DualArmProblem(model, target), model, options or SolveOptions())


def solve_lookat_ik(
    model: RobotModel,
    target: LookAtTarget,
    params: LookAtParams | None = None,
    options: SolveOptions | None = None,
) -> IKResult:
    """Locally minimize the look-at objective inside the joint limits."""
    return _solve(
        _LookAtProblem(model, target, params or LookAtParams()),
        model,
        options or SolveOptions(),
    )


def solve_trajectory(
    model: RobotModel,
    targets,
    params: LookAtParams | None = None,
    options: SolveOptions | None = None,
) -> list[IKResult]:
    """Solve a target sequence in order, warm-starting from each solution.

    The first frame uses ``options.seed_config``; every later frame seeds
    from the previous frame's solution. Per-frame non-convergence is
    reported in the corresponding result's flags.
    """
    targets = list(targets)
    if not targets:
        raise ValueError("empty target sequence")
    options = options or SolveOptions()
    params = params or LookAtParams()
    results: list[IKResult] = []
    for target in targets:
        if isinstance(target, LookAtTarget):
            result = solve_lookat_ik(model, target, params, options)
        elif isinstance(target, DualArmTarget):
            result = solve_dual_arm_ik(model, target, options)
        else:
            raise TypeError(f"unsupported target type: {type(target).__name__}")
        results.append(result)
        options = replace(options, seed_config=result.config)
    return results
