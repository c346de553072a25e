"""Kinematic model description: joints, chains, limits, and the bundled default.

A model document is JSON with top-level keys ``name``, ``joints``,
``manipulation_chain``, ``viewpoint_chain``, and ``gripper_joint``. Each
joint entry carries ``name``, ``kind`` ("revolute" or "prismatic"),
``axis`` (local unit 3-vector), ``origin_translation`` (meters),
``origin_rotation`` (extrinsic roll/pitch/yaw in radians),
``limit_min``/``limit_max`` (radians or meters by kind), and ``parent``
(a joint name or "base"). The joint graph must form a forest of serial
chains; each named chain must be a root-to-tip parent run.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .rotations import EulerAngles, UnitQuaternion, euler_to_quat

_DATA_DIR = Path(__file__).resolve().parent / "data"
DEFAULT_MODEL_PATH = _DATA_DIR / "default_model.json"

_KINDS = ("revolute", "prismatic")
_AXIS_RENORM_TOL = 1e-6


class ModelError(Exception):
    """Base class for model document problems."""


class ModelParseError(ModelError):
    """The document is not syntactically or structurally well formed."""


class ModelValidationError(ModelError):
    """The document parsed but violates a model invariant."""


@dataclass(frozen=True)
class JointSpec:
    """One degree of freedom in a serial chain."""

    name: str
    kind: str
    axis: np.ndarray
    origin_translation: np.ndarray
    origin_rotation: UnitQuaternion
    limit_min: float
    limit_max: float
    parent: str

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ModelValidationError(f"joint {self.name!r}: unknown kind {self.kind!r}")
        axis = np.asarray(self.axis, dtype=float).reshape(3)
        n = float(np.linalg.norm(axis))
        if not math.isfinite(n) or abs(n - 1.0) > _AXIS_RENORM_TOL:
            raise ModelValidationError(
                f"joint {self.name!r}: non-unit axis (norm {n!r})"
            )
        object.__setattr__(self, "axis", axis / n)
        object.__setattr__(
            self, "origin_translation",
            np.asarray(self.origin_translation, dtype=float).reshape(3),
        )
        if not (self.limit_min < self.limit_max):
            raise ModelValidationError(
                f"joint {self.name!r}: inverted limits "
                f"[{self.limit_min}, {self.limit_max}]"
            )


@dataclass(frozen=True)
class RobotModel:
    """Immutable kinematic description of a (possibly dual-chain) robot.

    Safe to share across threads after construction. ``joints`` order
    defines the layout of :class:`JointConfig` vectors.
    """

    name: str
    joints: tuple[JointSpec, ...]
    manipulation_chain: tuple[str, ...]
    viewpoint_chain: tuple[str, ...]
    gripper_joint: str | None

    # Derived lookups, built once at construction.
    _index: dict = field(init=False, repr=False, compare=False)
    _chain_m: tuple = field(init=False, repr=False, compare=False)
    _chain_v: tuple = field(init=False, repr=False, compare=False)
    _gripper_idx: object = field(init=False, repr=False, compare=False)
    _limits_lo: np.ndarray = field(init=False, repr=False, compare=False)
    _limits_hi: np.ndarray = field(init=False, repr=False, compare=False)
    _joint_table: tuple = field(init=False, repr=False, compare=False)

    @property
    def dof(self) -> int:
        return len(self.joints)

    def __post_init__(self):
        object.__setattr__(self, "joints", tuple(self.joints))
        object.__setattr__(self, "manipulation_chain", tuple(self.manipulation_chain))
        object.__setattr__(self, "viewpoint_chain", tuple(self.viewpoint_chain))
        _validate_structure(self)
        index = {j.name: i for i, j in enumerate(self.joints)}
        object.__setattr__(self, "_index", index)
        object.__setattr__(
            self, "_chain_m", tuple(index[n] for n in self.manipulation_chain)
        )
        object.__setattr__(
            self, "_chain_v", tuple(index[n] for n in self.viewpoint_chain)
        )
        object.__setattr__(
            self, "_gripper_idx",
            index[self.gripper_joint] if self.gripper_joint is not None else None,
        )
        lo = np.array([j.limit_min for j in self.joints])
        hi = np.array([j.limit_max for j in self.joints])
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "_limits_lo", lo)
        object.__setattr__(self, "_limits_hi", hi)
        # Flat per-joint records for the FK hot path: (is_prismatic,
        # axis, origin translation, origin rotation) as float tuples.
        table = tuple(
            (
                j.kind == "prismatic",
                (float(j.axis[0]), float(j.axis[1]), float(j.axis[2])),
                tuple(float(v) for v in j.origin_translation),
                (
                    j.origin_rotation.q0,
                    j.origin_rotation.q1,
                    j.origin_rotation.q2,
                    j.origin_rotation.q3,
                ),
            )
            for j in self.joints
        )
        object.__setattr__(self, "_joint_table", table)

    @property
    def limits_lower(self) -> np.ndarray:
        return self._limits_lo

    @property
    def limits_upper(self) -> np.ndarray:
        return self._limits_hi

    def joint_index(self, name: str) -> int:
        return self._index[name]


@dataclass(frozen=True)
class JointConfig:
    """A joint-value vector laid out in ``RobotModel.joints`` order.

    Create through :func:`joint_config` or :func:`clamp_to_limits`, which
    enforce the model's box limits.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def joint_config(model: RobotModel, values) -> JointConfig:
    """Validated constructor: errors when any element breaks its joint limits."""
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape[0] != model.dof:
        raise ValueError(f"expected {model.dof} joint values, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite joint value")
    below = arr < model._limits_lo
    above = arr > model._limits_hi
    if below.any() or above.any():
        i = int(np.argmax(below | above))
        raise ValueError(
            f"joint {model.joints[i].name!r} value {arr[i]!r} outside limits "
            f"[{model.joints[i].limit_min}, {model.joints[i].limit_max}]"
        )
    return JointConfig(arr)


def clamp_to_limits(model: RobotModel, raw) -> JointConfig:
    """Clamp a raw vector elementwise into the model's joint limits."""
    arr = np.asarray(raw, dtype=float).reshape(-1)
    if arr.shape[0] != model.dof:
        raise ValueError(f"expected {model.dof} joint values, got {arr.shape[0]}")
    return JointConfig(np.clip(arr, model._limits_lo, model._limits_hi))


def _validate_structure(model: RobotModel) -> None:
    names = [j.name for j in model.joints]
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise ModelValidationError(f"duplicate joint names: {dup}")
    if not model.joints:
        raise ModelValidationError("model has no joints")
    known = set(names)
    by_name = {j.name: j for j in model.joints}

    children: dict[str, list[str]] = {}
    for j in model.joints:
        if j.parent != "base":
            if j.parent not in known:
                raise ModelValidationError(
                    f"joint {j.name!r}: dangling parent {j.parent!r}"
                )
            if j.parent == j.name:
                raise ModelValidationError(f"joint {j.name!r}: cycle (self-parent)")
            children.setdefault(j.parent, []).append(j.name)

    # Cycle check: every joint must reach "base" through its parents.
    for j in model.joints:
        seen = {j.name}
        cur = j.parent
        while cur != "base":
            if cur in seen:
                raise ModelValidationError(
                    f"joint {j.name!r}: cycle through {cur!r}"
                )
            seen.add(cur)
            cur = by_name[cur].parent

    # Forest of chains: no branching anywhere.
    for parent, kids in children.items():
        if len(kids) > 1:
            raise ModelValidationError(
                f"joint {parent!r} has multiple children {sorted(kids)}; "
                "the joint graph must be a forest of serial chains"
            )

    if not model.manipulation_chain:
        raise ModelValidationError("manipulation_chain is empty")
    _validate_chain(model, model.manipulation_chain, "manipulation_chain", by_name)
    if model.viewpoint_chain:
        _validate_chain(model, model.viewpoint_chain, "viewpoint_chain", by_name)
    overlap = set(model.manipulation_chain) & set(model.viewpoint_chain)
    if overlap:
        raise ModelValidationError(
            f"chains share joints {sorted(overlap)}; chains must be disjoint"
        )

    if model.gripper_joint is not None:
        g = model.gripper_joint
        if g not in known:
            raise ModelValidationError(f"gripper joint {g!r} does not exist")
        if g in model.manipulation_chain or g in model.viewpoint_chain:
            raise ModelValidationError(
                f"gripper joint {g!r} must not be part of an end-effector chain"
            )
        # The gripper hangs off the manipulation side so it never moves
        # either end-effector frame.
        cur = by_name[g].parent
        while cur != "base" and cur not in model.manipulation_chain:
            if cur in model.viewpoint_chain:
                raise ModelValidationError(
                    f"gripper joint {g!r} descends from the viewpoint chain"
                )
            cur = by_name[cur].parent


def _validate_chain(model, chain, label, by_name) -> None:
    for n in chain:
        if n not in by_name:
            raise ModelValidationError(f"{label}: unknown joint {n!r}")
    if by_name[chain[0]].parent != "base":
        raise ModelValidationError(
            f"{label}: first joint {chain[0]!r} must be rooted at the base, "
            f"found parent {by_name[chain[0]].parent!r}"
        )
    for prev, cur in zip(chain, chain[1:]):
        if by_name[cur].parent != prev:
            raise ModelValidationError(
                f"{label}: joint {cur!r} does not follow {prev!r} "
                f"(its parent is {by_name[cur].parent!r})"
            )


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise ModelParseError(f"{context}: missing required field {key!r}")
    return obj[key]


def _as_vec3(value, context: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float).reshape(3)
    except (TypeError, ValueError) as exc:
        raise ModelParseError(f"{context}: expected 3 numbers, got {value!r}") from exc
    return arr


def parse_robot_model(text: str, source: str = "<string>") -> RobotModel:
    """Parse and validate a model document from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(
            f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ModelParseError(f"{source}: top level must be an object")

    name = doc.get("name", "unnamed")
    raw_joints = _require(doc, "joints", source)
    if not isinstance(raw_joints, list) or not raw_joints:
        raise ModelParseError(f"{source}: 'joints' must be a non-empty array")

    joints = []
    for i, entry in enumerate(raw_joints):
        ctx = f"{source}: joints[{i}]"
        if not isinstance(entry, dict):
            raise ModelParseError(f"{ctx}: expected an object")
        jname = _require(entry, "name", ctx)
        kind = _require(entry, "kind", ctx)
        axis = _as_vec3(_require(entry, "axis", ctx), f"{ctx}.axis")
        translation = _as_vec3(
            entry.get("origin_translation", (0.0, 0.0, 0.0)),
            f"{ctx}.origin_translation",
        )
        rpy = _as_vec3(
            entry.get("origin_rotation", (0.0, 0.0, 0.0)),
            f"{ctx}.origin_rotation",
        )
        try:
            lo = float(_require(entry, "limit_min", ctx))
            hi = float(_require(entry, "limit_max", ctx))
        except (TypeError, ValueError) as exc:
            raise ModelParseError(f"{ctx}: limits must be numbers") from exc
        parent = _require(entry, "parent", ctx)
        joints.append(
            JointSpec(
                name=str(jname),
                kind=str(kind),
                axis=axis,
                origin_translation=translation,
                origin_rotation=euler_to_quat(EulerAngles(*rpy)),
                limit_min=lo,
                limit_max=hi,
                parent=str(parent),
            )
        )

    manipulation_chain = _require(doc, "manipulation_chain", source)
    viewpoint_chain = _require(doc, "viewpoint_chain", source)
    gripper = _require(doc, "gripper_joint", source)
    for label, chain in (
        ("manipulation_chain", manipulation_chain),
        ("viewpoint_chain", viewpoint_chain),
    ):
        if not isinstance(chain, list) or not all(isinstance(n, str) for n in chain):
            raise ModelParseError(f"{source}: {label} must be an array of joint names")
    if gripper is not None and not isinstance(gripper, str):
        raise ModelParseError(f"{source}: gripper_joint must be a joint name or null")

    return RobotModel(
        name=str(name),
        joints=tuple(joints),
        manipulation_chain=tuple(manipulation_chain),
        viewpoint_chain=tuple(viewpoint_chain),
        gripper_joint=gripper,
    )


def load_robot_model(path) -> RobotModel:
    """Load and validate a model document from a file path."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ModelParseError(f"cannot read model document {p}: {exc}") from exc
    return parse_robot_model(text, source=str(p))


def load_default_model() -> RobotModel:
    """Load the bundled 17-DOF dual-arm model."""
    return load_robot_model(DEFAULT_MODEL_PATH)
