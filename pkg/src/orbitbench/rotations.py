"""Rotation representations.

Orientations live internally as unit quaternions (w, x, y, z), Hamilton
convention, rotating body-frame vectors into the world frame.  The 6D
form (first two rotation-matrix columns, decoded by Gram-Schmidt) is used
only at the agent-facing observation boundary, where its continuity
matters for learning.

All functions broadcast over leading batch dimensions.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidRotationError

_ORTHO_TOL = 1e-6
_COLUMN_MIN_NORM = 1e-8
_MIN_COLUMN_ANGLE_SIN = 1e-4


def quat_identity(shape=()) -> np.ndarray:
    q = np.zeros(shape + (4,))
    q[..., 0] = 1.0
    return q


def quat_normalize(q: np.ndarray) -> np.ndarray:
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = (a[..., i] for i in range(4))
    bw, bx, by, bz = (b[..., i] for i in range(4))
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def quat_conj(q: np.ndarray) -> np.ndarray:
    out = q.copy()
    out[..., 1:] = -out[..., 1:]
    return out


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate body-frame vectors v into the world frame."""
    w = q[..., :1]
    u = q[..., 1:]
    t = 2.0 * np.cross(u, v)
    return v + w * t + np.cross(u, t)


def quat_rotate_inv(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate world-frame vectors v into the body frame."""
    return quat_rotate(quat_conj(q), v)


def quat_from_axis_angle(axis: np.ndarray, angle) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    angle = np.asarray(angle, dtype=float)
    half = 0.5 * angle
    xyz = axis * np.sin(half)[..., None]
    return np.concatenate([np.cos(half)[..., None], xyz], axis=-1)


def quat_from_yaw(yaw) -> np.ndarray:
    yaw = np.asarray(yaw, dtype=float)
    half = 0.5 * yaw
    zeros = np.zeros_like(half)
    return np.stack([np.cos(half), zeros, zeros, np.sin(half)], axis=-1)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = (q[..., i] for i in range(4))
    row0 = np.stack(
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], axis=-1
    )
    row1 = np.stack(
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], axis=-1
    )
    row2 = np.stack(
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], axis=-1
    )
    return np.stack([row0, row1, row2], axis=-2)


def quat_step_body(q: np.ndarray, omega: np.ndarray, dt: float) -> np.ndarray:
    """Advance orientation by body-frame angular velocity over dt.

    Uses the exact quaternion exponential of omega*dt, then renormalizes.
    """
    phi = np.asarray(omega, dtype=float) * dt
    angle = np.linalg.norm(phi, axis=-1, keepdims=True)
    half = 0.5 * angle
    # sin(half)/angle -> 0.5 as angle -> 0
    small = angle < 1e-12
    scale = np.where(small, 0.5, np.sin(half) / np.where(small, 1.0, angle))
    dq = np.concatenate([np.cos(half), phi * scale], axis=-1)
    return quat_normalize(quat_mul(q, dq))


def quat_geodesic_angle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rotation angle (rad) taking orientation a to orientation b.

    atan2 form: well-conditioned near zero, exact 0.0 for identical inputs.
    """
    rel = quat_mul(quat_conj(a), b)
    return 2.0 * np.arctan2(
        np.linalg.norm(rel[..., 1:], axis=-1), np.abs(rel[..., 0])
    )


def yaw_of(q: np.ndarray) -> np.ndarray:
    """Heading of the body x-axis projected onto the world xy-plane."""
    w, x, y, z = (q[..., i] for i in range(4))
    # components of the rotated x-axis: R10 and R00
    return np.arctan2(2.0 * (x * y + w * z), 1.0 - 2.0 * (y * y + z * z))


def twist_z_of(q: np.ndarray) -> np.ndarray:
    """The z-twist angle of the swing-twist decomposition q = swing * twist.

    For orientations built as tilt(axis in xy-plane) * yaw, this recovers
    the yaw exactly, independent of the tilt; the projected-axis yaw_of
    does not, which matters when integrating a heading on sloped ground.
    """
    return 2.0 * np.arctan2(q[..., 3], q[..., 0])


def quat_align_z(normal: np.ndarray) -> np.ndarray:
    """Minimal rotation taking world +z onto the given unit normal."""
    n = np.asarray(normal, dtype=float)
    w = 1.0 + n[..., 2]
    xyz = np.stack([-n[..., 1], n[..., 0], np.zeros_like(w)], axis=-1)
    q = np.concatenate([w[..., None], xyz], axis=-1)
    return quat_normalize(q)


def rot6d_from_quat(q: np.ndarray) -> np.ndarray:
    """6D encoding straight from a unit quaternion (no validation).

    Equivalent to rot6d_encode(quat_to_matrix(q)) for unit input; used on
    the hot path where orientations are orthonormal by construction.
    """
    w, x, y, z = (q[..., i] for i in range(4))
    return np.stack(
        [
            1 - 2 * (y * y + z * z),
            2 * (x * y + w * z),
            2 * (x * z - w * y),
            2 * (x * y - w * z),
            1 - 2 * (x * x + z * z),
            2 * (y * z + w * x),
        ],
        axis=-1,
    )


def rot6d_encode(matrix: np.ndarray) -> np.ndarray:
    """First two columns of a rotation matrix, row-major per column."""
    m = np.asarray(matrix, dtype=float)
    if m.shape[-2:] != (3, 3):
        raise InvalidRotationError(f"expected (..., 3, 3) matrix, got {m.shape}")
    gram = np.swapaxes(m, -1, -2) @ m
    err = np.abs(gram - np.eye(3))
    if np.any(err > _ORTHO_TOL) or np.any(np.linalg.det(m) < 0.0):
        raise InvalidRotationError(
            "matrix is not orthonormal within 1e-6 (or not right-handed)"
        )
    return np.concatenate([m[..., :, 0], m[..., :, 1]], axis=-1)


def rot6d_decode(v: np.ndarray) -> np.ndarray:
    """Gram-Schmidt a 6-vector (two raw columns) into a rotation matrix."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != 6:
        raise InvalidRotationError(f"expected (..., 6) vector, got {v.shape}")
    a1 = v[..., 0:3]
    a2 = v[..., 3:6]
    n1 = np.linalg.norm(a1, axis=-1, keepdims=True)
    n2 = np.linalg.norm(a2, axis=-1, keepdims=True)
    if np.any(n1 < _COLUMN_MIN_NORM) or np.any(n2 < _COLUMN_MIN_NORM):
        raise InvalidRotationError("near-zero column in 6D rotation")
    b1 = a1 / n1
    proj = np.sum(a2 * b1, axis=-1, keepdims=True)
    r2 = a2 - proj * b1
    rn = np.linalg.norm(r2, axis=-1, keepdims=True)
    # sin of the angle between the columns after normalization
    if np.any(rn / n2 <= _MIN_COLUMN_ANGLE_SIN):
        raise InvalidRotationError("6D rotation columns are near parallel")
    b2 = r2 / rn
    b3 = np.cross(b1, b2)
    return np.stack([b1, b2, b3], axis=-1)
