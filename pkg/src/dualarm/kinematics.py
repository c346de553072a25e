"""Forward kinematics of the manipulation and viewpoint chains.

Chains compose parent-to-child: each joint first applies its fixed origin
transform (translation then rotation), then its own motion — a rotation
about the local axis for revolute joints, a translation along it for
prismatic joints. All orientation math runs on quaternions internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .robot_model import JointConfig, RobotModel
from .rotations import UnitQuaternion, quat_to_matrix

_ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class Pose:
    """Position (meters) and orientation of a frame in world coordinates."""

    position: np.ndarray
    orientation: UnitQuaternion

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3)
        pos.setflags(write=False)
        object.__setattr__(self, "position", pos)


@dataclass(frozen=True)
class DualArmPose:
    manipulation: Pose
    viewpoint: Pose


@dataclass(frozen=True)
class ViewFrame:
    """World-frame local y and z axes of the viewpoint end-effector."""

    w_y: np.ndarray
    w_z: np.ndarray

    def __post_init__(self):
        w_y = np.asarray(self.w_y, dtype=float).reshape(3)
        w_z = np.asarray(self.w_z, dtype=float).reshape(3)
        if abs(np.linalg.norm(w_y) - 1.0) > _ORTHO_TOL:
            raise ValueError("w_y is not a unit vector")
        if abs(np.linalg.norm(w_z) - 1.0) > _ORTHO_TOL:
            raise ValueError("w_z is not a unit vector")
        if abs(float(w_y @ w_z)) > _ORTHO_TOL:
            raise ValueError("w_y and w_z are not orthogonal")
        w_y.setflags(write=False)
        w_z.setflags(write=False)
        object.__setattr__(self, "w_y", w_y)
        object.__setattr__(self, "w_z", w_z)


# ---------------------------------------------------------------------------
# Scalar hot path: poses as ((px, py, pz), (qw, qx, qy, qz)) float tuples.
# ---------------------------------------------------------------------------

_IDENTITY_STATE = ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0))


def _qmul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


def _qrot(q, v):
    w, x, y, z = q
    vx, vy, vz = v
    tx = 2.0 * (y * vz - z * vy)
    ty = 2.0 * (z * vx - x * vz)
    tz = 2.0 * (x * vy - y * vx)
    return (
        vx + w * tx + (y * tz - z * ty),
        vy + w * ty + (z * tx - x * tz),
        vz + w * tz + (x * ty - y * tx),
    )


def _apply_joint(state, record, value):
    """Advance a chain state through one joint at the given value."""
    (px, py, pz), q = state
    prismatic, axis, trans, origin_q = record
    tx, ty, tz = _qrot(q, trans)
    px, py, pz = px + tx, py + ty, pz + tz
    q = _qmul(q, origin_q)
    if prismatic:
        dx, dy, dz = _qrot(q, (axis[0] * value, axis[1] * value, axis[2] * value))
        return ((px + dx, py + dy, pz + dz), q)
    half = 0.5 * value
    s = math.sin(half)
    jq = (math.cos(half), s * axis[0], s * axis[1], s * axis[2])
    return ((px, py, pz), _qmul(q, jq))


def _chain_state(model: RobotModel, values, chain) -> tuple:
    """Scalar FK over one chain; ``values`` is a plain list of floats."""
    state = _IDENTITY_STATE
    table = model._joint_table
    for idx in chain:
        state = _apply_joint(state, table[idx], values[idx])
    return state


def _chain_prefixes(model: RobotModel, values, chain) -> list:
    """States before each chain joint plus the final state (len(chain) + 1)."""
    out = [_IDENTITY_STATE]
    state = _IDENTITY_STATE
    table = model._joint_table
    for idx in chain:
        state = _apply_joint(state, table[idx], values[idx])
        out.append(state)
    return out


def _chain_state_from(model: RobotModel, values, chain, start, prefix_state) -> tuple:
    """Resume FK at chain position ``start`` from a cached prefix state."""
    state = prefix_state
    table = model._joint_table
    for pos in range(start, len(chain)):
        idx = chain[pos]
        state = _apply_joint(state, table[idx], values[idx])
    return state


def _state_to_pose(state) -> Pose:
    (px, py, pz), (qw, qx, qy, qz) = state
    return Pose(np.array([px, py, pz]), UnitQuaternion(qw, qx, qy, qz))


# ---------------------------------------------------------------------------
# Public surface
# ---------------------------------------------------------------------------


def forward_kinematics(model: RobotModel, config: JointConfig) -> DualArmPose:
    """End-effector poses of both chains at the given configuration.

    The gripper joint is not part of either chain, so its value never
    affects the result. An empty viewpoint chain yields the identity pose.
    """
    values = config.values.tolist()
    if len(values) != model.dof:
        raise ValueError(f"expected {model.dof} joint values, got {len(values)}")
    m_state = _chain_state(model, values, model._chain_m)
    v_state = _chain_state(model, values, model._chain_v)
    return DualArmPose(_state_to_pose(m_state), _state_to_pose(v_state))


def view_frame(pose: Pose) -> ViewFrame:
    """Local y and z axes of a pose, expressed in world coordinates."""
    m = quat_to_matrix(pose.orientation)
    return ViewFrame(m[:, 1].copy(), m[:, 2].copy())
