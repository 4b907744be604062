"""Value types for rotations of the sphere.

Immutable and hashable so they can be shared freely between worker threads.
The arithmetic on them lives in ``app.services.rotor``.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

UNIT_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class UnitQuaternion:
    """Unit quaternion w + xi + yj + zk representing a rotation in SO(3).

    q and -q are the same rotation; instances built through ``from_components``
    carry the canonical sign (w > 0, or first nonzero component positive).
    """

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        norm_sq = self.w**2 + self.x**2 + self.y**2 + self.z**2
        if abs(norm_sq - 1.0) > 2 * UNIT_TOL:
            raise ValueError(f"Quaternion is not unit: norm^2 = {norm_sq!r}")

    @classmethod
    def from_components(
        cls, w: float, x: float, y: float, z: float
    ) -> "UnitQuaternion":
        """Normalise and canonicalise arbitrary nonzero components."""
        norm = math.sqrt(w * w + x * x + y * y + z * z)
        if norm == 0.0:
            raise ValueError("Zero quaternion has no rotation")
        w, x, y, z = w / norm, x / norm, y / norm, z / norm
        if w < 0.0 or (w == 0.0 and _first_nonzero(x, y, z) < 0.0):
            w, x, y, z = -w, -x, -y, -z
        return cls(w + 0.0, x + 0.0, y + 0.0, z + 0.0)

    @classmethod
    def identity(cls) -> "UnitQuaternion":
        """The identity rotation."""
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_axis_angle(
        cls, axis: tuple[float, float, float], angle: float
    ) -> "UnitQuaternion":
        """Rotation by ``angle`` radians about ``axis`` (right-hand rule)."""
        ax, ay, az = axis
        norm = math.sqrt(ax * ax + ay * ay + az * az)
        s = math.sin(angle / 2) / norm
        return cls.from_components(math.cos(angle / 2), ax * s, ay * s, az * s)

    def as_array(self) -> np.ndarray:
        """Components as a float64 array ``[w, x, y, z]``."""
        return np.array((self.w, self.x, self.y, self.z), dtype=np.float64)


def _first_nonzero(*values: float) -> float:
    for value in values:
        if value != 0.0:
            return value
    return 0.0


@dataclass(frozen=True, slots=True)
class SpherePoint:
    """Point of the unit sphere S^2."""

    ux: float
    uy: float
    uz: float

    def __post_init__(self):
        norm_sq = self.ux**2 + self.uy**2 + self.uz**2
        if abs(norm_sq - 1.0) > 2 * UNIT_TOL:
            raise ValueError(f"Point is not on the unit sphere: norm^2 = {norm_sq!r}")

    @classmethod
    def from_vector(cls, ux: float, uy: float, uz: float) -> "SpherePoint":
        """Normalise a nonzero 3-vector onto the sphere."""
        norm = math.sqrt(ux * ux + uy * uy + uz * uz)
        if norm == 0.0:
            raise ValueError("Zero vector has no direction")
        return cls(ux / norm, uy / norm, uz / norm)

    def __neg__(self) -> "SpherePoint":
        return SpherePoint(-self.ux, -self.uy, -self.uz)

    def as_array(self) -> np.ndarray:
        """Coordinates as a float64 array ``[ux, uy, uz]``."""
        return np.array((self.ux, self.uy, self.uz), dtype=np.float64)


@dataclass(frozen=True, slots=True)
class AllOfSphere:
    """Fixed-point set of the identity rotation: every point, none isolated."""


@dataclass(frozen=True, slots=True)
class IsolatedPair:
    """The two antipodal axis points fixed by a non-identity rotation.

    Each point carries multiplicity 1.
    """

    u: SpherePoint
    v: SpherePoint

    @property
    def points(self) -> tuple[SpherePoint, SpherePoint]:
        return (self.u, self.v)


FixedPointSet = AllOfSphere | IsolatedPair


@dataclass(frozen=True, slots=True)
class Cap:
    """Closed geodesic ball B(center, radius) on the sphere."""

    center: SpherePoint
    radius: float

    def __post_init__(self):
        if not 0.0 < self.radius <= math.pi:
            raise ValueError(f"Cap radius must lie in (0, pi], got {self.radius!r}")


class GeneratorMode(str, Enum):
    """How words over a generator list are formed."""

    SEMIGROUP = "semigroup"
    GROUP = "group"


@dataclass(frozen=True, slots=True)
class Word:
    """Sequence of generator indices; the leftmost letter acts last."""

    letters: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)
