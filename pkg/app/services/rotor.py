"""Geometry of SO(3) acting on the sphere.

Scalar operations work on ``UnitQuaternion``/``SpherePoint`` values; the
``*_batch`` variants do the same on float64 arrays of shape (N, 4) or (N, 3)
and are what the enumeration-heavy experiments use.
"""

import logging
import math

import numpy as np

from app.errors import InternalInconsistencyError
from app.models.geometry import (
    AllOfSphere,
    FixedPointSet,
    IsolatedPair,
    SpherePoint,
    UnitQuaternion,
)

logger = logging.getLogger(__name__)

DEFAULT_IDENTITY_TOL = 1e-9
MAX_CHARACTER_DEGREE = 64
_DEGENERATE_AXIS = 1e-300


def conjugate(q: UnitQuaternion) -> UnitQuaternion:
    """Inverse rotation."""
    return UnitQuaternion.from_components(q.w, -q.x, -q.y, -q.z)


def compose(q1: UnitQuaternion, q2: UnitQuaternion) -> UnitQuaternion:
    """Hamilton product q1*q2 (apply q2 first), renormalised, canonical sign."""
    w = q1.w * q2.w - q1.x * q2.x - q1.y * q2.y - q1.z * q2.z
    x = q1.w * q2.x + q1.x * q2.w + q1.y * q2.z - q1.z * q2.y
    y = q1.w * q2.y - q1.x * q2.z + q1.y * q2.w + q1.z * q2.x
    z = q1.w * q2.z + q1.x * q2.y - q1.y * q2.x + q1.z * q2.w
    return UnitQuaternion.from_components(w, x, y, z)


def act(q: UnitQuaternion, v: SpherePoint) -> SpherePoint:
    """Rotate ``v`` by ``q`` (the conjugation q v q*), renormalised."""
    # v' = v + w t + u x t with t = 2 u x v
    tx = 2.0 * (q.y * v.uz - q.z * v.uy)
    ty = 2.0 * (q.z * v.ux - q.x * v.uz)
    tz = 2.0 * (q.x * v.uy - q.y * v.ux)
    return SpherePoint.from_vector(
        v.ux + q.w * tx + (q.y * tz - q.z * ty),
        v.uy + q.w * ty + (q.z * tx - q.x * tz),
        v.uz + q.w * tz + (q.x * ty - q.y * tx),
    )


def rotation_angle(q: UnitQuaternion) -> float:
    """Rotation angle in [0, pi].

    Equal to 2*arccos|w|; the atan2 form keeps full precision near the identity.
    """
    return 2.0 * math.atan2(math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z), abs(q.w))


def fixed_point_set(
    q: UnitQuaternion, identity_tol: float = DEFAULT_IDENTITY_TOL
) -> FixedPointSet:
    """Fixed points of ``q`` on the sphere.

    A rotation by theta has differential at its axis point equal to a planar
    rotation by theta, so its fixed points are isolated exactly when theta != 0.

    Args:
        q: Rotation.
        identity_tol: Angles at or below this count as the identity.

    Returns:
        ``AllOfSphere`` for the identity, otherwise the antipodal axis pair.

    Raises:
        InternalInconsistencyError: If the angle exceeds the tolerance while the
            vector part vanishes.
    """
    if rotation_angle(q) <= identity_tol:
        return AllOfSphere()
    norm = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    if norm < _DEGENERATE_AXIS:
        raise InternalInconsistencyError(
            f"Rotation {q} has angle above {identity_tol} but no axis"
        )
    axis = SpherePoint.from_vector(q.x / norm, q.y / norm, q.z / norm)
    return IsolatedPair(axis, -axis)


def character(q: UnitQuaternion, l: int) -> float:
    """Character of the (2l+1)-dimensional irreducible representation of SO(3).

    chi_l(theta) = sin((2l+1)theta/2) / sin(theta/2), evaluated as
    1 + 2 sum_{k<=l} cos(k theta) so that chi_l(0) = 2l+1 needs no special case.
    """
    if not 0 <= l <= MAX_CHARACTER_DEGREE:
        raise ValueError(f"Character degree must lie in [0, {MAX_CHARACTER_DEGREE}]")
    theta = rotation_angle(q)
    return 1.0 + 2.0 * sum(math.cos(k * theta) for k in range(1, l + 1))


# Batched variants


def compose_batch(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Hamilton products of broadcastable (..., 4) arrays, renormalised.

    The canonical sign is not applied; see ``canonical_sign_batch``.
    """
    w1, x1, y1, z1 = np.moveaxis(q1, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(q2, -1, 0)
    out = np.stack(
        (
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ),
        axis=-1,
    )
    out /= np.linalg.norm(out, axis=-1, keepdims=True)
    return out


def canonical_sign_batch(q: np.ndarray) -> np.ndarray:
    """Flip rows of an (N, 4) array to the canonical sign, in place."""
    nonzero = q != 0.0
    first = np.argmax(nonzero, axis=1)
    lead = q[np.arange(len(q)), first]
    q[lead < 0.0] *= -1.0
    return q


def act_batch(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate one point (3,) or matching points (N, 3) by (N, 4) rotations."""
    w = q[:, :1]
    u = q[:, 1:]
    t = 2.0 * np.cross(u, np.broadcast_to(v, u.shape))
    out = v + w * t + np.cross(u, t)
    out /= np.linalg.norm(out, axis=1, keepdims=True)
    return out


def rotation_angle_batch(q: np.ndarray) -> np.ndarray:
    """Rotation angles of an (N, 4) array."""
    return 2.0 * np.arctan2(np.linalg.norm(q[:, 1:], axis=1), np.abs(q[:, 0]))


def axes_batch(
    q: np.ndarray, identity_tol: float = DEFAULT_IDENTITY_TOL
) -> tuple[np.ndarray, int]:
    """Unit axes of the non-identity rotations of an (N, 4) array.

    Returns:
        Tuple of (axes of shape (M, 3), number of identity rotations N - M).
    """
    angles = rotation_angle_batch(q)
    isolated = angles > identity_tol
    vec = q[isolated, 1:]
    norms = np.linalg.norm(vec, axis=1, keepdims=True)
    if np.any(norms < _DEGENERATE_AXIS):
        raise InternalInconsistencyError(
            "Rotation above identity tolerance has no axis"
        )
    return vec / norms, int(len(q) - np.count_nonzero(isolated))


def characters_batch(angles: np.ndarray, l_max: int) -> np.ndarray:
    """Characters chi_1..chi_lmax at each angle; shape (l_max, N)."""
    if not 0 <= l_max <= MAX_CHARACTER_DEGREE:
        raise ValueError(f"Character degree must lie in [0, {MAX_CHARACTER_DEGREE}]")
    k = np.arange(1, l_max + 1, dtype=np.float64)[:, None]
    return 1.0 + 2.0 * np.cumsum(np.cos(k * angles[None, :]), axis=0)
