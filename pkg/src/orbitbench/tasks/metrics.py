"""Trajectory evaluation metrics."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidParameterError
from ..rotations import quat_geodesic_angle


def compute_ate(traj_pos, ref_pos, traj_quat=None, ref_quat=None):
    """Average tracking error between an executed and a reference trajectory.

    Returns (location ATE in meters, orientation ATE in degrees): the mean
    Euclidean position error and the mean geodesic rotation angle over the
    time-aligned pose pairs.  Orientation ATE is 0.0 when no quaternions
    are supplied.
    """
    traj_pos = np.asarray(traj_pos, dtype=float)
    ref_pos = np.asarray(ref_pos, dtype=float)
    if traj_pos.shape != ref_pos.shape or len(traj_pos) < 1:
        raise InvalidParameterError(
            f"trajectories must be equal-length and nonempty, got "
            f"{traj_pos.shape} vs {ref_pos.shape}"
        )
    loc = float(np.mean(np.linalg.norm(traj_pos - ref_pos, axis=-1)))
    if traj_quat is None and ref_quat is None:
        return loc, 0.0
    if traj_quat is None or ref_quat is None:
        raise InvalidParameterError("provide both quaternion sequences or neither")
    traj_quat = np.asarray(traj_quat, dtype=float)
    ref_quat = np.asarray(ref_quat, dtype=float)
    if traj_quat.shape != ref_quat.shape or len(traj_quat) != len(traj_pos):
        raise InvalidParameterError("quaternion sequences must match the positions")
    ori = float(np.degrees(np.mean(quat_geodesic_angle(traj_quat, ref_quat))))
    return loc, ori
