"""Rotation representations and conversions.

Conventions used throughout the package:

- Euler angles are extrinsic fixed-axis X-Y-Z roll/pitch/yaw, i.e. the
  rotation matrix is ``Rz(yaw) @ Ry(pitch) @ Rx(roll)``.
- Quaternions are scalar-first ``(q0, q1, q2, q3)`` and unit norm.
- Axis-angle is canonicalized to ``angle in [0, pi]`` with a unit axis;
  the zero rotation reports axis ``[0, 0, 1]``.
- The quaternion logarithm uses the half-angle convention,
  ``log(q) = (angle / 2) * axis``, so the displacement distance between
  the identity and a rotation by ``theta`` equals ``(theta / 2) ** 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Norm drift up to this much is silently repaired; beyond it is an error.
_RENORM_TOL = 1e-6
# Norm deviation at or below this is already unit to double precision;
# dividing would only churn the last bits (and break exact sign flips).
_ALREADY_UNIT = 1e-12
# |sin(pitch)| above 1 - this is treated as gimbal lock.
_GIMBAL_TOL = 1e-9


@dataclass(frozen=True)
class EulerAngles:
    """Roll/pitch/yaw in radians (extrinsic X-Y-Z)."""

    roll: float
    pitch: float
    yaw: float

    def __post_init__(self):
        for name in ("roll", "pitch", "yaw"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite Euler angle: {name}")

    def as_array(self) -> np.ndarray:
        return np.array([self.roll, self.pitch, self.yaw])


@dataclass(frozen=True)
class UnitQuaternion:
    """Unit quaternion with scalar part ``q0`` and vector part ``(q1, q2, q3)``.

    Construction renormalizes when the norm deviates from 1 by at most
    1e-6 and raises ``ValueError`` beyond that.
    """

    q0: float
    q1: float
    q2: float
    q3: float

    def __post_init__(self):
        n = math.sqrt(self.q0**2 + self.q1**2 + self.q2**2 + self.q3**2)
        if not math.isfinite(n) or abs(n - 1.0) > _RENORM_TOL:
            raise ValueError(f"quaternion norm {n!r} deviates from 1 by more than {_RENORM_TOL}")
        if abs(n - 1.0) > _ALREADY_UNIT:
            object.__setattr__(self, "q0", self.q0 / n)
            object.__setattr__(self, "q1", self.q1 / n)
            object.__setattr__(self, "q2", self.q2 / n)
            object.__setattr__(self, "q3", self.q3 / n)

    @classmethod
    def identity(cls) -> "UnitQuaternion":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_array(cls, q) -> "UnitQuaternion":
        q0, q1, q2, q3 = (float(v) for v in q)
        return cls(q0, q1, q2, q3)

    def as_array(self) -> np.ndarray:
        return np.array([self.q0, self.q1, self.q2, self.q3])

    def conjugate(self) -> "UnitQuaternion":
        return UnitQuaternion(self.q0, -self.q1, -self.q2, -self.q3)

    def __neg__(self) -> "UnitQuaternion":
        return UnitQuaternion(-self.q0, -self.q1, -self.q2, -self.q3)

    def __mul__(self, other: "UnitQuaternion") -> "UnitQuaternion":
        """Hamilton product ``self * other``."""
        a0, a1, a2, a3 = self.q0, self.q1, self.q2, self.q3
        b0, b1, b2, b3 = other.q0, other.q1, other.q2, other.q3
        return UnitQuaternion(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )

    def dot(self, other: "UnitQuaternion") -> float:
        return (
            self.q0 * other.q0
            + self.q1 * other.q1
            + self.q2 * other.q2
            + self.q3 * other.q3
        )

    def rotate(self, v) -> np.ndarray:
        """Rotate a 3-vector by this quaternion."""
        vx, vy, vz = (float(c) for c in v)
        w, x, y, z = self.q0, self.q1, self.q2, self.q3
        # v' = v + 2*w*(u x v) + 2*(u x (u x v)) with u the vector part
        tx = 2.0 * (y * vz - z * vy)
        ty = 2.0 * (z * vx - x * vz)
        tz = 2.0 * (x * vy - y * vx)
        return np.array(
            [
                vx + w * tx + (y * tz - z * ty),
                vy + w * ty + (z * tx - x * tz),
                vz + w * tz + (x * ty - y * tx),
            ]
        )


@dataclass(frozen=True, eq=False)
class AxisAngle:
    """Rotation axis (unit 3-vector) and angle in radians."""

    axis: np.ndarray
    angle: float

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float).reshape(3)
        n = float(np.linalg.norm(axis))
        if not math.isfinite(n) or abs(n - 1.0) > _RENORM_TOL:
            raise ValueError(f"axis norm {n!r} deviates from 1 by more than {_RENORM_TOL}")
        if not math.isfinite(self.angle):
            raise ValueError("non-finite rotation angle")
        if abs(n - 1.0) > _ALREADY_UNIT:
            axis = axis / n
        axis.setflags(write=False)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "angle", float(self.angle))


def euler_to_quat(e: EulerAngles) -> UnitQuaternion:
    """Convert roll/pitch/yaw to a unit quaternion (``qz(yaw)*qy(pitch)*qx(roll)``)."""
    hr, hp, hy = 0.5 * e.roll, 0.5 * e.pitch, 0.5 * e.yaw
    cr, sr = math.cos(hr), math.sin(hr)
    cp, sp = math.cos(hp), math.sin(hp)
    cy, sy = math.cos(hy), math.sin(hy)
    return UnitQuaternion(
        cy * cp * cr + sy * sp * sr,
        cy * cp * sr - sy * sp * cr,
        cy * sp * cr + sy * cp * sr,
        sy * cp * cr - cy * sp * sr,
    )


def quat_to_euler(q: UnitQuaternion) -> EulerAngles:
    """Convert a unit quaternion to canonical-range roll/pitch/yaw.

    Roll and yaw land in (-pi, pi], pitch in [-pi/2, pi/2]. At gimbal
    lock (|pitch| = pi/2) roll is forced to zero and the free angle is
    absorbed into yaw, so the output is deterministic.
    """
    w, x, y, z = q.q0, q.q1, q.q2, q.q3
    sin_pitch = 2.0 * (w * y - x * z)
    if abs(sin_pitch) > 1.0 - _GIMBAL_TOL:
        pitch = math.copysign(0.5 * math.pi, sin_pitch)
        # r01 = 2(xy - wz), r02 = 2(xz + wy); with roll = 0 the remaining
        # freedom satisfies [r01, r02] = [-sin(yaw), sign(pitch)*cos(yaw)].
        r01 = 2.0 * (x * y - w * z)
        r02 = 2.0 * (x * z + w * y)
        yaw = math.atan2(-r01, math.copysign(1.0, sin_pitch) * r02)
        return EulerAngles(0.0, pitch, yaw)
    pitch = math.asin(max(-1.0, min(1.0, sin_pitch)))
    roll = math.atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y))
    yaw = math.atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z))
    return EulerAngles(roll, pitch, yaw)


def axisangle_to_quat(aa: AxisAngle) -> UnitQuaternion:
    half = 0.5 * aa.angle
    s = math.sin(half)
    ux, uy, uz = aa.axis
    return UnitQuaternion(math.cos(half), s * ux, s * uy, s * uz)


def quat_to_axisangle(q: UnitQuaternion) -> AxisAngle:
    """Extract the canonical axis-angle: angle in [0, pi], unit axis.

    The sign of the quaternion is flipped first so the scalar part is
    non-negative; the zero rotation reports the fixed axis [0, 0, 1].
    """
    w, x, y, z = q.q0, q.q1, q.q2, q.q3
    if w < 0.0:
        w, x, y, z = -w, -x, -y, -z
    vn = math.sqrt(x * x + y * y + z * z)
    angle = 2.0 * math.atan2(vn, w)
    if vn == 0.0:
        return AxisAngle(np.array([0.0, 0.0, 1.0]), 0.0)
    return AxisAngle(np.array([x / vn, y / vn, z / vn]), angle)


def quat_to_matrix(q: UnitQuaternion) -> np.ndarray:
    """3x3 rotation matrix of a unit quaternion."""
    w, x, y, z = q.q0, q.q1, q.q2, q.q3
    return np.array(
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    )


def matrix_to_quat(m) -> UnitQuaternion:
    """Unit quaternion of a 3x3 rotation matrix (largest-pivot extraction)."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    trace = m[0, 0] + m[1, 1] + m[2, 2]
    if trace > 0.0:
        s = math.sqrt(trace + 1.0) * 2.0
        w = 0.25 * s
        x = (m[2, 1] - m[1, 2]) / s
        y = (m[0, 2] - m[2, 0]) / s
        z = (m[1, 0] - m[0, 1]) / s
    elif m[0, 0] >= m[1, 1] and m[0, 0] >= m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        w = (m[2, 1] - m[1, 2]) / s
        x = 0.25 * s
        y = (m[0, 1] + m[1, 0]) / s
        z = (m[0, 2] + m[2, 0]) / s
    elif m[1, 1] >= m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        w = (m[0, 2] - m[2, 0]) / s
        x = (m[0, 1] + m[1, 0]) / s
        y = 0.25 * s
        z = (m[1, 2] + m[2, 1]) / s
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        w = (m[1, 0] - m[0, 1]) / s
        x = (m[0, 2] + m[2, 0]) / s
        y = (m[1, 2] + m[2, 1]) / s
        z = 0.25 * s
    return UnitQuaternion(w, x, y, z)


def quat_log(q: UnitQuaternion) -> np.ndarray:
    """Logarithm map of a unit quaternion, half-angle convention.

    Returns ``(angle / 2) * axis`` for the canonical axis-angle of ``q``;
    the identity maps to the zero vector, and the norm of the result is
    bounded by pi/2.
    """
    w, x, y, z = q.q0, q.q1, q.q2, q.q3
    if w < 0.0:
        w, x, y, z = -w, -x, -y, -z
    vn = math.sqrt(x * x + y * y + z * z)
    if vn == 0.0:
        return np.zeros(3)
    half_angle = math.atan2(vn, w)
    scale = half_angle / vn
    return np.array([scale * x, scale * y, scale * z])


def _relative_parts(r1: UnitQuaternion, r2: UnitQuaternion):
    """Scalar part and vector norm of ``r1^-1 * r2`` on raw components.

    Working on raw floats keeps the cancellation exact, so identical
    inputs give a vector norm of exactly zero.
    """
    a0, a1, a2, a3 = r1.q0, -r1.q1, -r1.q2, -r1.q3
    b0, b1, b2, b3 = r2.q0, r2.q1, r2.q2, r2.q3
    w = a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3
    # Grouped so the terms cancel pairwise (exactly) when r2 = +/- r1.
    x = (a0 * b1 + a1 * b0) + (a2 * b3 - a3 * b2)
    y = (a0 * b2 + a2 * b0) + (a3 * b1 - a1 * b3)
    z = (a0 * b3 + a3 * b0) + (a1 * b2 - a2 * b1)
    return w, math.sqrt(x * x + y * y + z * z)


def quat_displacement_distance(r1: UnitQuaternion, r2: UnitQuaternion) -> float:
    """Squared norm of the displacement log, minimized over the antipodal pair.

    The canonical half-angle log of the relative quaternion and of its
    negation coincide, so the antipodal minimum reduces to taking the
    scalar part's absolute value. Zero exactly when ``r1`` and ``r2``
    represent the same rotation (including ``r2 = -r1``); bounded above
    by ``(pi/2)**2``.
    """
    w, vn = _relative_parts(r1, r2)
    half_angle = math.atan2(vn, abs(w))
    return half_angle * half_angle


def geodesic_angle(q1: UnitQuaternion, q2: UnitQuaternion) -> float:
    """Angle of the relative rotation between two quaternions, in [0, pi].

    Computed with atan2 rather than acos so angles near zero keep full
    precision.
    """
    w, vn = _relative_parts(q1, q2)
    return 2.0 * math.atan2(vn, abs(w))
