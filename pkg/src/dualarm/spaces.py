"""State-action space encodings and trajectory retargeting.

Seven spaces are supported. ``C`` is the raw joint-value vector. The
end-effector spaces flatten both end-effector poses with a chosen
rotation representation and append the gripper value:
``[p_m, R_m, p_v, R_v, gripper]``. The look-at spaces drop the viewpoint
rotation block: ``[p_m, R_m, p_v, gripper]``. Euler blocks are 3 wide,
quaternion and axis-angle blocks 4 wide (axis first, angle last), which
gives widths 17 / 13, 15, 15 / 10, 11, 11.

Trajectory documents are JSON with keys ``space``, ``dt``, ``frames``
(array of number rows), written with fixed 17-significant-digit floats
so output is byte-deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from ._fmt import f17
from .ik import (
    DualArmTarget,
    IKResult,
    LookAtParams,
    LookAtTarget,
    SolveOptions,
    solve_trajectory,
)
from .kinematics import forward_kinematics
from .robot_model import JointConfig, RobotModel, clamp_to_limits, joint_config
from .rotations import (
    AxisAngle,
    EulerAngles,
    UnitQuaternion,
    axisangle_to_quat,
    euler_to_quat,
    quat_to_axisangle,
    quat_to_euler,
)


SAMPLE_TRAJECTORY_PATH = Path(__file__).resolve().parent / "data" / "sample_trajectory_c.json"


class SpaceId(Enum):
    C = "C"
    E_E = "E_E"
    E_Q = "E_Q"
    E_AA = "E_AA"
    L_E = "L_E"
    L_Q = "L_Q"
    L_AA = "L_AA"


_DIMS = {
    SpaceId.C: 17,
    SpaceId.E_E: 13,
    SpaceId.E_Q: 15,
    SpaceId.E_AA: 15,
    SpaceId.L_E: 10,
    SpaceId.L_Q: 11,
    SpaceId.L_AA: 11,
}

# Width of the rotation block per representation family.
_REP_WIDTH = {"E": 3, "Q": 4, "AA": 4}


def space_dim(space: SpaceId) -> int:
    """Learning-space width for the 17-DOF reference system."""
    return _DIMS[space]


def _family(space: SpaceId) -> str:
    """Rotation representation family: "E", "Q", "AA", or "" for C."""
    _, _, fam = space.value.partition("_")
    return fam


def _has_view_rotation(space: SpaceId) -> bool:
    return space.value.startswith("E_")


@dataclass(frozen=True)
class SpaceVector:
    """One state in a given space.

    Embedded quaternion blocks must be unit within 1e-6 and axis-angle
    axes unit within 1e-6. ``C`` vectors follow the robot's DOF count
    (17 for the bundled model); the other spaces have fixed widths.
    """

    space: SpaceId
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise ValueError("non-finite element in space vector")
        if self.space is SpaceId.C:
            if values.shape[0] < 1:
                raise ValueError("empty joint-space vector")
        else:
            expected = _DIMS[self.space]
            if values.shape[0] != expected:
                raise ValueError(
                    f"{self.space.value} vector must have {expected} elements, "
                    f"got {values.shape[0]}"
                )
            fam = _family(self.space)
            for start in _rotation_block_offsets(self.space):
                block = values[start : start + _REP_WIDTH[fam]]
                if fam == "Q":
                    n = float(np.linalg.norm(block))
                    if abs(n - 1.0) > 1e-6:
                        raise ValueError(
                            f"embedded quaternion at offset {start} has norm {n!r}"
                        )
                elif fam == "AA":
                    n = float(np.linalg.norm(block[:3]))
                    if abs(n - 1.0) > 1e-6:
                        raise ValueError(
                            f"embedded axis at offset {start} has norm {n!r}"
                        )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def _rotation_block_offsets(space: SpaceId) -> tuple[int, ...]:
    """Start offsets of rotation blocks within a non-C space vector."""
    fam = _family(space)
    width = _REP_WIDTH[fam]
    offsets = [3]
    if _has_view_rotation(space):
        offsets.append(3 + width + 3)
    return tuple(offsets)


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed sequence of states, all in the same space."""

    space: SpaceId
    dt: float
    frames: tuple[SpaceVector, ...]

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise ValueError("trajectory has no frames")
        if not (self.dt > 0.0):
            raise ValueError("dt must be positive")
        width = frames[0].values.shape[0]
        for i, fr in enumerate(frames):
            if fr.space is not self.space:
                raise ValueError(
                    f"frame {i} is in space {fr.space.value}, expected {self.space.value}"
                )
            if fr.values.shape[0] != width:
                raise ValueError(f"frame {i} has inconsistent width")
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    def matrix(self) -> np.ndarray:
        """Frames stacked as an (N, dim) array."""
        return np.stack([f.values for f in self.frames])


# ---------------------------------------------------------------------------
# Encoding / decoding
# ---------------------------------------------------------------------------


def _rotation_to_block(q: UnitQuaternion, fam: str) -> list[float]:
    if fam == "E":
        e = quat_to_euler(q)
        return [e.roll, e.pitch, e.yaw]
    if fam == "Q":
        return [q.q0, q.q1, q.q2, q.q3]
    aa = quat_to_axisangle(q)
    return [float(aa.axis[0]), float(aa.axis[1]), float(aa.axis[2]), aa.angle]


def _block_to_rotation(block, fam: str) -> UnitQuaternion:
    if fam == "E":
        return euler_to_quat(EulerAngles(float(block[0]), float(block[1]), float(block[2])))
    if fam == "Q":
        return UnitQuaternion.from_array(block)
    return axisangle_to_quat(AxisAngle(np.asarray(block[:3], dtype=float), float(block[3])))


def encode_state(model: RobotModel, config: JointConfig, space: SpaceId) -> SpaceVector:
    """Express a joint configuration in the given space.

    ``C`` copies the joint values verbatim; the other spaces run forward
    kinematics, convert the rotations, and append the gripper value
    (0.0 when the model has no gripper joint).
    """
    if space is SpaceId.C:
        return SpaceVector(space, config.values)
    pose = forward_kinematics(model, config)
    fam = _family(space)
    gripper = (
        float(config.values[model._gripper_idx])
        if model._gripper_idx is not None
        else 0.0
    )
    parts = list(pose.manipulation.position)
    parts += _rotation_to_block(pose.manipulation.orientation, fam)
    parts += list(pose.viewpoint.position)
    if _has_view_rotation(space):
        parts += _rotation_to_block(pose.viewpoint.orientation, fam)
    parts.append(gripper)
    return SpaceVector(space, np.array(parts))


def decode_target(vector: SpaceVector, model: RobotModel | None = None):
    """Turn a space vector into an IK target (or a configuration for ``C``).

    Returns a ``(target, gripper_value)`` pair: end-effector spaces give a
    :class:`DualArmTarget`, look-at spaces a :class:`LookAtTarget`, and
    ``C`` a :class:`JointConfig` (which requires ``model`` for limit
    validation). Embedded rotations with more than 1e-6 norm deviation
    raise ``ValueError``.
    """
    if vector.space is SpaceId.C:
        if model is None:
            raise ValueError("decoding a C-space vector requires the robot model")
        config = joint_config(model, vector.values)
        gripper = (
            float(config.values[model._gripper_idx])
            if model._gripper_idx is not None
            else 0.0
        )
        return config, gripper
    fam = _family(vector.space)
    width = _REP_WIDTH[fam]
    v = vector.values
    p_m = v[0:3]
    r_m = _block_to_rotation(v[3 : 3 + width], fam)
    base = 3 + width
    p_v = v[base : base + 3]
    base += 3
    if _has_view_rotation(vector.space):
        r_v = _block_to_rotation(v[base : base + width], fam)
        base += width
        gripper = float(v[base])
        return DualArmTarget(p_m, r_m, p_v, r_v), gripper
    gripper = float(v[base])
    return LookAtTarget(p_m, r_m, p_v), gripper


def encode_trajectory(
    model: RobotModel,
    configs,
    space: SpaceId,
    dt: float,
    quat_continuity: bool = True,
) -> Trajectory:
    """Encode a configuration sequence, keeping quaternion signs continuous.

    With ``quat_continuity`` (the default) each quaternion block is
    sign-flipped so its dot product with the previous frame's block stays
    non-negative, which avoids artificial jumps in the written signal.
    Axis-angle blocks are always the raw per-frame canonical form.
    """
    configs = list(configs)
    if not configs:
        raise ValueError("empty configuration sequence")
    rows = [encode_state(model, c, space).values.copy() for c in configs]
    if quat_continuity and _family(space) == "Q":
        offsets = _rotation_block_offsets(space)
        for prev, cur in zip(rows, rows[1:]):
            for start in offsets:
                sl = slice(start, start + 4)
                if float(prev[sl] @ cur[sl]) < 0.0:
                    cur[sl] = -cur[sl]
    return Trajectory(space, dt, tuple(SpaceVector(space, row) for row in rows))


def retarget_trajectory(
    model: RobotModel,
    traj: Trajectory,
    to: SpaceId,
    params: LookAtParams | None = None,
    options: SolveOptions | None = None,
) -> tuple[Trajectory, list[IKResult]]:
    """Re-express a trajectory in another space.

    ``C`` sources encode directly through forward kinematics (no IK and
    an empty diagnostics list). End-effector and look-at sources are
    decoded frame by frame and solved to configurations with warm starts;
    the decoded gripper value is written back into each solution. Frame
    count and dt are always preserved.
    """
    if traj.space is SpaceId.C:
        configs = [joint_config(model, f.values) for f in traj.frames]
        diagnostics: list[IKResult] = []
    else:
        decoded = [decode_target(f) for f in traj.frames]
        diagnostics = solve_trajectory(
            model, [t for t, _ in decoded], params, options
        )
        configs = []
        for result, (_, gripper) in zip(diagnostics, decoded):
            values = result.config.values.copy()
            if model._gripper_idx is not None:
                values[model._gripper_idx] = gripper
            configs.append(clamp_to_limits(model, values))
    if to is SpaceId.C:
        frames = tuple(SpaceVector(SpaceId.C, c.values) for c in configs)
        return Trajectory(SpaceId.C, traj.dt, frames), diagnostics
    return encode_trajectory(model, configs, to, traj.dt), diagnostics


# ---------------------------------------------------------------------------
# Trajectory documents
# ---------------------------------------------------------------------------


def trajectory_to_json(traj: Trajectory) -> str:
    rows = ",\n".join(
        "    [" + ", ".join(f17(x) for x in frame.values) + "]"
        for frame in traj.frames
    )
    return (
        "{\n"
        f'  "space": "{traj.space.value}",\n'
        f'  "dt": {f17(traj.dt)},\n'
        '  "frames": [\n'
        f"{rows}\n"
        "  ]\n"
        "}\n"
    )


def trajectory_from_json(text: str, source: str = "<string>") -> Trajectory:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{source}: top level must be an object")
    for key in ("space", "dt", "frames"):
        if key not in doc:
            raise ValueError(f"{source}: missing required field {key!r}")
    try:
        space = SpaceId(doc["space"])
    except ValueError:
        valid = ", ".join(s.value for s in SpaceId)
        raise ValueError(
            f"{source}: unknown space {doc['space']!r} (expected one of {valid})"
        ) from None
    try:
        dt = float(doc["dt"])
    except (TypeError, ValueError):
        raise ValueError(f"{source}: dt must be a number") from None
    rows = doc["frames"]
    if not isinstance(rows, list) or not rows:
        raise ValueError(f"{source}: 'frames' must be a non-empty array")
    frames = []
    for i, row in enumerate(rows):
        try:
            frames.append(SpaceVector(space, np.asarray(row, dtype=float)))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"{source}: frames[{i}]: {exc}") from exc
    return Trajectory(space, dt, tuple(frames))


def write_trajectory(traj: Trajectory, path) -> None:
    Path(path).write_text(trajectory_to_json(traj))


def read_trajectory(path) -> Trajectory:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ValueError(f"cannot read trajectory {p}: {exc}") from exc
    return trajectory_from_json(text, source=str(p))
