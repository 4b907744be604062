"""Empirical measures on the sphere and equidistribution diagnostics.

An accumulator collects weighted points (or rotation angles) and keeps
compensated sums of:

- real spherical harmonics Y_lm, orthonormal against the uniform probability
  measure (so Y_00 = 1 and the uniform target is S_00 = mass, 0 elsewhere);
- weights falling in a configured list of closed caps;
- characters chi_l of SO(3), when the run tests equidistribution on the group.

The sphere experiments enumerate words by prefix task, fill one accumulator per
task and merge them in task order.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np

from app.config import get_settings
from app.errors import (
    AccumulatorConfigError,
    BudgetExceededError,
    EmptyAccumulatorError,
)
from app.models.geometry import Cap, GeneratorMode, SpherePoint, UnitQuaternion
from app.models.reports import CapRow, ExperimentReport
from app.services import rotor, tasks, words
from app.services.words import GeneratorSystem

logger = logging.getLogger(__name__)

DEFAULT_DEGREE = 8
DEFAULT_CAP_RADII = (0.25, 0.5, 1.0)
MAX_CHARACTER_EXPERIMENT_DEGREE = 16
_COMMUTE_TOL = 1e-9


def harmonic_index(l: int, m: int) -> int:
    """Flat index of (l, m) in the Weyl table."""
    return l * l + l + m


def real_harmonics(points: np.ndarray, degree: int) -> np.ndarray:
    """Real orthonormal spherical harmonics up to ``degree`` at unit vectors.

    Associated Legendre functions by the standard upward recurrence with the
    Condon-Shortley phase, divided by sin(theta)^m so the azimuthal factor is
    Re/Im of (x + iy)^m and the poles need no special handling.

    Args:
        points: Array of shape (N, 3).
        degree: Maximum degree L.

    Returns:
        Array of shape ((L+1)^2, N); row ``harmonic_index(l, m)`` holds Y_lm.
    """
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    out = np.empty(((degree + 1) ** 2, len(points)), dtype=np.float64)
    cos_m = np.ones_like(x)
    sin_m = np.zeros_like(x)
    diagonal = 1.0
    root2 = math.sqrt(2.0)

    for m in range(degree + 1):
        if m > 0:
            cos_m, sin_m = cos_m * x - sin_m * y, sin_m * x + cos_m * y
            diagonal *= -math.sqrt((2 * m + 1) / (2 * m))
        previous = np.full_like(x, diagonal)
        before = None
        for l in range(m, degree + 1):
            if l == m:
                current = previous
            elif l == m + 1:
                current = math.sqrt(2 * m + 3) * z * previous
            else:
                a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
                b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
                current = a * (z * previous - b * before)
            if l > m:
                before, previous = previous, current
            if m == 0:
                out[harmonic_index(l, 0)] = current
            else:
                out[harmonic_index(l, m)] = root2 * current * cos_m
                out[harmonic_index(l, -m)] = root2 * current * sin_m
    return out


def _neumaier_add(total: np.ndarray, comp: np.ndarray, values: np.ndarray) -> None:
    """In-place compensated addition of ``values`` into (total, comp)."""
    summed = total + values
    big = np.abs(total) >= np.abs(values)
    comp += np.where(big, (total - summed) + values, (values - summed) + total)
    total[...] = summed


class SphericalAccumulator:
    """Single-writer accumulator of a weighted empirical measure on the sphere.

    Args:
        degree: Maximum harmonic degree L of the Weyl table.
        caps: Caps whose weights are tracked.
        char_degree: Highest character degree tracked (0 disables characters).
    """

    def __init__(
        self,
        degree: int = DEFAULT_DEGREE,
        caps: Sequence[Cap] = (),
        char_degree: int = 0,
    ):
        if degree < 0:
            raise ValueError(f"Harmonic degree must be nonnegative, got {degree}")
        self.degree = degree
        self.caps = tuple(caps)
        self.char_degree = char_degree
        self.count = 0
        size = (degree + 1) ** 2
        self._total = (np.zeros(1), np.zeros(1))
        self._weyl = (np.zeros(size), np.zeros(size))
        self._cap_weights = (np.zeros(len(self.caps)), np.zeros(len(self.caps)))
        self._char_weight = (np.zeros(1), np.zeros(1))
        self._chars = (np.zeros(char_degree), np.zeros(char_degree))
        self._centers = np.array(
            [cap.center.as_array() for cap in self.caps], dtype=np.float64
        ).reshape(-1, 3)
        self._cos_radii = np.cos([cap.radius for cap in self.caps])

    def configuration(self) -> tuple:
        return (self.degree, self.caps, self.char_degree)

    @property
    def total_weight(self) -> float:
        return float(self._total[0][0] + self._total[1][0])

    @property
    def char_weight(self) -> float:
        return float(self._char_weight[0][0] + self._char_weight[1][0])

    def weyl_table(self) -> np.ndarray:
        """Compensated Weyl sums S_lm, flat-indexed by ``harmonic_index``."""
        return self._weyl[0] + self._weyl[1]

    def weyl(self, l: int, m: int) -> float:
        """Weyl sum S[l][m]."""
        if not (0 <= l <= self.degree and -l <= m <= l):
            raise IndexError(f"(l, m) = ({l}, {m}) outside degree {self.degree}")
        return float(self.weyl_table()[harmonic_index(l, m)])

    def cap_weights(self) -> np.ndarray:
        return self._cap_weights[0] + self._cap_weights[1]

    def char_sums(self) -> np.ndarray:
        return self._chars[0] + self._chars[1]

    def add_points(
        self, points: np.ndarray, weights: np.ndarray | None = None
    ) -> None:
        """Accumulate unit vectors of shape (N, 3) with positive weights."""
        if len(points) == 0:
            return
        if weights is None:
            weights = np.ones(len(points))
        elif np.any(weights <= 0.0):
            raise ValueError("Point weights must be positive")
        batch_weight = np.array([weights.sum()])

        sums = real_harmonics(points, self.degree) @ weights
        # Y_00 is identically 1; keep S_00 bit-identical to the total weight.
        sums[0] = batch_weight[0]
        _neumaier_add(*self._weyl, sums)
        _neumaier_add(*self._total, batch_weight)

        if self.caps:
            inside = self._centers @ points.T >= self._cos_radii[:, None]
            _neumaier_add(*self._cap_weights, inside.astype(np.float64) @ weights)
        self.count += len(points)

    def add_rotation_angles(
        self, angles: np.ndarray, weights: np.ndarray | None = None
    ) -> None:
        """Accumulate characters chi_1..chi_L' of rotations given by their angles."""
        if self.char_degree == 0 or len(angles) == 0:
            return
        if weights is None:
            weights = np.ones(len(angles))
        chars = rotor.characters_batch(angles, self.char_degree)
        _neumaier_add(*self._chars, chars @ weights)
        _neumaier_add(*self._char_weight, np.array([weights.sum()]))

    def copy(self) -> "SphericalAccumulator":
        clone = SphericalAccumulator(self.degree, self.caps, self.char_degree)
        clone.count = self.count
        for name in ("_total", "_weyl", "_cap_weights", "_char_weight", "_chars"):
            total, comp = getattr(self, name)
            setattr(clone, name, (total.copy(), comp.copy()))
        return clone


def accumulate(acc: SphericalAccumulator, v: SpherePoint, weight: float) -> None:
    """Add ``weight`` times the Dirac mass at ``v``."""
    if weight <= 0.0:
        raise ValueError(f"Weight must be positive, got {weight!r}")
    acc.add_points(v.as_array()[None, :], np.array([float(weight)]))


def merge(a: SphericalAccumulator, b: SphericalAccumulator) -> SphericalAccumulator:
    """Entrywise compensated sum of two accumulators with equal configuration.

    Raises:
        AccumulatorConfigError: If degree, caps or character degree differ.
    """
    if a.configuration() != b.configuration():
        raise AccumulatorConfigError(
            f"Cannot merge accumulators {a.configuration()} and {b.configuration()}"
        )
    merged = a.copy()
    for name in ("_total", "_weyl", "_cap_weights", "_char_weight", "_chars"):
        total, comp = getattr(merged, name)
        other_total, other_comp = getattr(b, name)
        _neumaier_add(total, comp, other_total)
        _neumaier_add(total, comp, other_comp)
    merged.count = a.count + b.count
    return merged


def cap_area(r: float) -> float:
    """Normalised measure (1 - cos r)/2 of a cap of geodesic radius r."""
    if not 0.0 < r <= math.pi:
        raise ValueError(f"Cap radius must lie in (0, pi], got {r!r}")
    return (1.0 - math.cos(r)) / 2.0


def cap_fraction(acc: SphericalAccumulator, cap_index: int, normalizer: int) -> float:
    """Cap weight divided by the experiment's normaliser d_n (not by the mass).

    Raises:
        EmptyAccumulatorError: If nothing has been accumulated.
    """
    if acc.total_weight <= 0.0:
        raise EmptyAccumulatorError("Cap fraction of an empty accumulator")
    return float(acc.cap_weights()[cap_index]) / normalizer


def weyl_rms(acc: SphericalAccumulator) -> list[float]:
    """Per-degree RMS over m of S_lm / total_weight, for l = 1..L."""
    total = acc.total_weight
    if total <= 0.0:
        raise EmptyAccumulatorError("Weyl sums of an empty accumulator")
    table = acc.weyl_table() / total
    return [
        math.sqrt(float(np.mean(table[l * l : (l + 1) ** 2] ** 2)))
        for l in range(1, acc.degree + 1)
    ]


def default_caps() -> list[Cap]:
    """Radii 0.25, 0.5, 1.0 around (0,0,1), (1,0,0) and (1,1,1)/sqrt(3)."""
    centers = (
        SpherePoint(0.0, 0.0, 1.0),
        SpherePoint(1.0, 0.0, 0.0),
        SpherePoint.from_vector(1.0, 1.0, 1.0),
    )
    return [Cap(center, radius) for center in centers for radius in DEFAULT_CAP_RADII]


def _commute(g: UnitQuaternion, h: UnitQuaternion) -> bool:
    commutator = rotor.compose(
        rotor.compose(g, h), rotor.compose(rotor.conjugate(g), rotor.conjugate(h))
    )
    return rotor.rotation_angle(commutator) <= _COMMUTE_TOL


def hypothesis_flags(
    system: GeneratorSystem, base_point: SpherePoint | None = None
) -> list[str]:
    """Flag configurations outside the hypotheses of the equidistribution theorems.

    Flags are informational only; experiments still run.
    """
    flags = []
    gens = system.generators
    if system.degree == 1 or len(set(gens)) == 1:
        flags.append("single-generator")
    elif all(_commute(g, h) for g in gens for h in gens):
        flags.append("commuting-generators")
    if system.mode is GeneratorMode.SEMIGROUP and system.degree != 2:
        flags.append("semigroup-d-not-2")
    if base_point is not None:
        base = base_point.as_array()
        if all(
            np.allclose(rotor.act(g, base_point).as_array(), base, atol=1e-12)
            for g in gens
        ):
            flags.append("base-point-fixed")
    return flags


def _check_budget(system: GeneratorSystem, n: int) -> int:
    count = words.word_count(system, n)
    budget = get_settings().budgets.sphere_words
    if count > budget:
        raise BudgetExceededError(
            f"{count} words of length {n} exceed the sphere budget of {budget}"
        )
    return count


def _run_partitioned(system, n, depth, threads, fill) -> SphericalAccumulator:
    depth = words.default_depth(system, n) if depth is None else min(depth, n)
    task_count = words.word_count(system, depth)
    logger.debug("Partition depth %d: %d tasks", depth, task_count)

    def task(index: int) -> SphericalAccumulator:
        return fill(words.word_products(system, n, (depth, index)))

    return tasks.fold_ordered(task, task_count, merge, threads)


def _cap_rows(
    acc: SphericalAccumulator, normalizer: int, s: float
) -> list[CapRow]:
    rows = []
    for i, cap in enumerate(acc.caps):
        empirical = float(acc.cap_weights()[i]) / normalizer
        reference = s * cap_area(cap.radius)
        rows.append(
            CapRow(
                center=(cap.center.ux, cap.center.uy, cap.center.uz),
                radius=cap.radius,
                empirical=empirical,
                reference=reference,
                residual=empirical - reference,
            )
        )
    return rows


def orbit_experiment(
    system: GeneratorSystem,
    a: SpherePoint,
    n: int,
    degree: int = DEFAULT_DEGREE,
    caps: Sequence[Cap] | None = None,
    *,
    depth: int | None = None,
    threads: int = 1,
) -> ExperimentReport:
    """Orbit measure |H_n|^-1 sum_{g in H_n} delta_{g a} against the uniform measure."""
    normalizer = _check_budget(system, n)
    caps = default_caps() if caps is None else list(caps)
    base = a.as_array()
    logger.info("Orbit experiment: n=%d, %d words", n, normalizer)

    def fill(products: np.ndarray) -> SphericalAccumulator:
        acc = SphericalAccumulator(degree, caps)
        acc.add_points(rotor.act_batch(products, base))
        return acc

    acc = _run_partitioned(system, n, depth, threads, fill)
    mass = acc.total_weight / normalizer
    return ExperimentReport(
        kind="orbit",
        n=n,
        degree=normalizer,
        count=acc.count,
        mass=mass,
        estimated_s=mass,
        weyl_rms=weyl_rms(acc),
        caps=_cap_rows(acc, normalizer, 1.0),
        flags=hypothesis_flags(system, a),
    )


def axis_experiment(
    system: GeneratorSystem,
    n: int,
    degree: int = DEFAULT_DEGREE,
    caps: Sequence[Cap] | None = None,
    *,
    depth: int | None = None,
    threads: int = 1,
    identity_tol: float = rotor.DEFAULT_IDENTITY_TOL,
) -> ExperimentReport:
    """Isolated fixed points of the words of length n, normalised by d_n.

    Each non-identity word contributes its two axis points with multiplicity 1;
    identity words fix the whole sphere and contribute nothing. The reference
    for every cap is 2 times its area.
    """
    normalizer = _check_budget(system, n)
    caps = default_caps() if caps is None else list(caps)
    identities = []
    logger.info("Axis experiment: n=%d, %d words", n, normalizer)

    def fill(products: np.ndarray) -> SphericalAccumulator:
        acc = SphericalAccumulator(degree, caps)
        axes, trivial = rotor.axes_batch(products, identity_tol)
        acc.add_points(np.concatenate((axes, -axes)))
        identities.append(trivial)
        return acc

    acc = _run_partitioned(system, n, depth, threads, fill)
    flags = hypothesis_flags(system)
    if sum(identities):
        flags.append("identity-words")
        logger.warning("%d words of length %d act as the identity", sum(identities), n)

    mass = acc.total_weight / normalizer
    return ExperimentReport(
        kind="axes",
        n=n,
        degree=normalizer,
        count=acc.count,
        mass=mass,
        estimated_s=mass,
        weyl_rms=weyl_rms(acc) if acc.count else [0.0] * degree,
        caps=_cap_rows(acc, normalizer, 2.0),
        flags=flags,
    )


def character_experiment(
    system: GeneratorSystem,
    n: int,
    l_max: int = 4,
    *,
    depth: int | None = None,
    threads: int = 1,
) -> ExperimentReport:
    """Averages of chi_1..chi_lmax over H_n; all tend to 0 for equidistribution."""
    if not 1 <= l_max <= MAX_CHARACTER_EXPERIMENT_DEGREE:
        raise ValueError(
            f"l_max must lie in [1, {MAX_CHARACTER_EXPERIMENT_DEGREE}], got {l_max}"
        )
    normalizer = _check_budget(system, n)
    logger.info("Character experiment: n=%d, %d words", n, normalizer)

    def fill(products: np.ndarray) -> SphericalAccumulator:
        acc = SphericalAccumulator(0, (), l_max)
        acc.add_rotation_angles(rotor.rotation_angle_batch(products))
        return acc

    acc = _run_partitioned(system, n, depth, threads, fill)
    mass = acc.char_weight / normalizer
    return ExperimentReport(
        kind="characters",
        n=n,
        degree=normalizer,
        count=normalizer,
        mass=mass,
        estimated_s=mass,
        char=[float(v) / normalizer for v in acc.char_sums()],
        flags=hypothesis_flags(system),
    )


def random_caps(count: int, seed: int, radius: float = 0.5) -> list[Cap]:
    """``count`` caps of one radius, centres uniform from a seeded generator."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(count, 3))
    return [
        Cap(SpherePoint.from_vector(*map(float, center)), radius) for center in centers
    ]
