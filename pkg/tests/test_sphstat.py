"""Tests for the spherical accumulator and the sphere experiments."""

import math

import numpy as np
import pytest

from app.errors import (
    AccumulatorConfigError,
    BudgetExceededError,
    EmptyAccumulatorError,
)
from app.models.geometry import Cap, GeneratorMode, SpherePoint, UnitQuaternion
from app.services import sphstat, words
from app.services.sphstat import SphericalAccumulator
from app.services.words import GeneratorSystem

NORTH = SpherePoint(0.0, 0.0, 1.0)


def random_points(count: int, seed: int = 7) -> np.ndarray:
    points = np.random.default_rng(seed).normal(size=(count, 3))
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def test_low_degree_harmonics():
    """Y_00 = 1 and Y_10 = sqrt(3) z under the probability normalisation."""
    table = sphstat.real_harmonics(np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]), 2)
    assert np.allclose(table[sphstat.harmonic_index(0, 0)], 1.0)
    assert table[sphstat.harmonic_index(1, 0)] == pytest.approx([math.sqrt(3), 0.0])


def test_harmonics_are_orthonormal():
    """Monte Carlo Gram matrix is close to the identity."""
    table = sphstat.real_harmonics(random_points(200_000), 3)
    gram = table @ table.T / table.shape[1]
    assert np.allclose(gram, np.eye(len(gram)), atol=0.05)


def test_single_point_accumulation():
    """A unit mass at the north pole."""
    acc = SphericalAccumulator(degree=2, caps=[Cap(NORTH, 0.1)])
    sphstat.accumulate(acc, NORTH, 1.0)
    assert acc.total_weight == 1.0
    assert acc.weyl(0, 0) == 1.0
    assert acc.weyl(1, 0) == pytest.approx(math.sqrt(3))
    assert sphstat.cap_fraction(acc, 0, 1) == 1.0


def test_accumulate_rejects_nonpositive_weight():
    """Weights must be positive."""
    with pytest.raises(ValueError):
        sphstat.accumulate(SphericalAccumulator(), NORTH, 0.0)


def test_weyl_00_equals_total():
    """S_00 equals the total weight exactly."""
    acc = SphericalAccumulator(degree=4)
    acc.add_points(random_points(1000), np.full(1000, 0.37))
    assert acc.weyl(0, 0) == acc.total_weight


def test_antipodal_pairs_cancel_odd_degrees():
    """Odd-degree sums of a symmetric point set vanish."""
    points = random_points(500)
    acc = SphericalAccumulator(degree=3)
    acc.add_points(np.concatenate((points, -points)))
    for m in range(-1, 2):
        assert abs(acc.weyl(1, m)) < 1e-9
    for m in range(-3, 4):
        assert abs(acc.weyl(3, m)) < 1e-9


def test_merge_is_deterministic_and_checked():
    """Merging partial accumulators matches a single pass; configs must match."""
    points = random_points(400)
    caps = sphstat.default_caps()
    whole = SphericalAccumulator(4, caps)
    whole.add_points(points)
    left, right = SphericalAccumulator(4, caps), SphericalAccumulator(4, caps)
    left.add_points(points[:150])
    right.add_points(points[150:])
    merged = sphstat.merge(left, right)
    assert merged.count == 400
    assert np.allclose(merged.weyl_table(), whole.weyl_table(), atol=1e-12)
    assert np.array_equal(merged.cap_weights(), whole.cap_weights())
    with pytest.raises(AccumulatorConfigError):
        sphstat.merge(left, SphericalAccumulator(3, caps))


def test_empty_accumulator_statistics():
    """Statistics of an empty accumulator are refused."""
    acc = SphericalAccumulator(degree=2, caps=[Cap(NORTH, 0.5)])
    with pytest.raises(EmptyAccumulatorError):
        sphstat.cap_fraction(acc, 0, 1)
    with pytest.raises(EmptyAccumulatorError):
        sphstat.weyl_rms(acc)


def test_cap_area():
    """Normalised area (1 - cos r)/2; the whole sphere has area 1."""
    assert sphstat.cap_area(math.pi) == 1.0
    assert sphstat.cap_area(0.5) == pytest.approx(0.0612087, abs=1e-6)
    with pytest.raises(ValueError):
        sphstat.cap_area(0.0)


def test_random_caps_are_reproducible():
    """The same seed yields the same caps."""
    assert sphstat.random_caps(3, 11) == sphstat.random_caps(3, 11)
    assert sphstat.random_caps(3, 11) != sphstat.random_caps(3, 12)


def test_axis_experiment_mass_is_two():
    """Each of the 2^n words contributes its two axis points."""
    report = sphstat.axis_experiment(words.lps_system(), 6, degree=2)
    assert report.degree == 64
    assert report.count == 128
    assert report.mass == 2.0
    assert "identity-words" not in report.flags


def test_axis_experiment_thread_count_invariance():
    """One thread and four threads give the same report."""
    system = words.lps_system()
    single = sphstat.axis_experiment(system, 8, degree=3, depth=3, threads=1)
    pooled = sphstat.axis_experiment(system, 8, degree=3, depth=3, threads=4)
    assert single.count == pooled.count
    assert single.mass == pooled.mass
    assert np.allclose(single.weyl_rms, pooled.weyl_rms, atol=1e-9)
    for a, b in zip(single.caps, pooled.caps):
        assert a.empirical == pytest.approx(b.empirical, abs=1e-9)


def test_axis_experiment_group_mode():
    """Reduced words of the group system also carry mass 2."""
    report = sphstat.axis_experiment(words.lps_system(GeneratorMode.GROUP), 3, degree=2)
    assert report.degree == 150
    assert report.mass == 2.0


def test_degenerate_system_has_zero_mass_and_flags():
    """Rz(pi) at even n gives only identity words: no isolated fixed points."""
    system = GeneratorSystem(
        (UnitQuaternion.from_axis_angle((0.0, 0.0, 1.0), math.pi),)
    )
    report = sphstat.axis_experiment(system, 2, degree=2)
    assert report.mass == 0.0
    assert "identity-words" in report.flags
    assert "single-generator" in report.flags


def test_orbit_experiment_mass_is_one():
    """Orbit measures are probability measures."""
    report = sphstat.orbit_experiment(words.lps_system(), NORTH, 5, degree=2)
    assert report.mass == pytest.approx(1.0)
    assert report.count == 32
    assert all(row.reference == sphstat.cap_area(row.radius) for row in report.caps)


def test_base_point_fixed_flag():
    """A base point on the common axis of every generator is flagged."""
    system = GeneratorSystem(
        (UnitQuaternion.from_axis_angle((0.0, 0.0, 1.0), 1.0),)
    )
    flags = sphstat.hypothesis_flags(system, NORTH)
    assert "base-point-fixed" in flags
    assert "semigroup-d-not-2" in flags


def test_character_experiment_single_rotation_does_not_decay():
    """Powers of one rotation keep large character averages (negative control)."""
    system = GeneratorSystem(
        (UnitQuaternion.from_axis_angle((0.0, 0.0, 1.0), 0.1),)
    )
    report = sphstat.character_experiment(system, 1, l_max=2)
    assert report.char[0] == pytest.approx(1 + 2 * math.cos(0.1))


def test_character_experiment_decays_for_free_generators():
    """Character averages shrink with n for the lps5 pair."""
    system = words.lps_system()
    early = sphstat.character_experiment(system, 2, l_max=2)
    late = sphstat.character_experiment(system, 12, l_max=2)
    assert abs(late.char[0]) < abs(early.char[0])
    assert late.mass == pytest.approx(1.0)


def test_sphere_budget(budget_env):
    """Runs above the word budget are refused before enumeration."""
    budget_env("sphere_words", 100)
    with pytest.raises(BudgetExceededError):
        sphstat.axis_experiment(words.lps_system(), 7)


def fibonacci_sphere(count: int) -> np.ndarray:
    index = np.arange(count)
    z = 1.0 - (2 * index + 1) / count
    phi = 2 * math.pi * index / ((1 + math.sqrt(5)) / 2) ** 2
    rho = np.sqrt(1.0 - z * z)
    return np.stack((rho * np.cos(phi), rho * np.sin(phi), z), axis=1)


def closed_form_character(angle: float, l: int) -> float:
    return 1.0 + 2.0 * sum(math.cos(k * angle) for k in range(1, l + 1))


def test_cap_fraction_of_near_uniform_cloud():
    """A Fibonacci lattice of 10^6 points fills each cap in proportion to its area."""
    centers = [NORTH, SpherePoint(1.0, 0.0, 0.0), SpherePoint.from_vector(1, 1, 1)]
    caps = [Cap(center, 0.5) for center in centers]
    acc = SphericalAccumulator(degree=0, caps=caps)
    acc.add_points(fibonacci_sphere(1_000_000))
    for index in range(len(caps)):
        assert sphstat.cap_fraction(acc, index, 1_000_000) == pytest.approx(
            sphstat.cap_area(0.5), rel=0.01
        )


@pytest.mark.parametrize("n", [3, 5])
def test_half_turn_at_odd_length_fixes_the_poles(n):
    """Rz(pi)^n for odd n is a half-turn: its axis points are the two poles."""
    system = GeneratorSystem(
        (UnitQuaternion.from_axis_angle((0.0, 0.0, 1.0), math.pi),)
    )
    report = sphstat.axis_experiment(system, n, degree=2, caps=[Cap(NORTH, 0.1)])
    assert report.degree == 1
    assert report.mass == 2.0
    assert report.caps[0].empirical == 1.0
    assert "identity-words" not in report.flags


def test_semigroup_character_average_at_n_3():
    """tr(M^3) = 23/125 for the averaged rotation M of the lps5 pair."""
    report = sphstat.character_experiment(words.lps_system(), 3, l_max=1)
    assert report.char[0] == pytest.approx(23 / 125, abs=1e-12)


def test_group_character_average_at_n_3():
    """Reduced words of length 3 over q1, q2, q3 and inverses average 0.08672."""
    report = sphstat.character_experiment(
        words.lps_system(GeneratorMode.GROUP), 3, l_max=1
    )
    assert report.char[0] == pytest.approx(3 * 4.336 / 150, abs=1e-12)


def test_default_partition_is_used_when_depth_is_omitted(mocker):
    """Group n = 8 splits into the 30 prefixes of length 2."""
    spy = mocker.spy(words, "word_products")
    sphstat.axis_experiment(words.lps_system(GeneratorMode.GROUP), 8, degree=2)
    assert spy.call_count == 30
    assert {call.args[2][0] for call in spy.call_args_list} == {2}


@pytest.mark.acceptance
def test_orbit_weyl_sums_decay():
    """Degree-1 orbit RMS falls at every step from n = 10 to 20."""
    system = words.lps_system()
    base = SpherePoint(1.0, 0.0, 0.0)
    reports = [
        sphstat.orbit_experiment(system, base, n, degree=4, threads=4)
        for n in range(10, 21)
    ]
    first = [report.weyl_rms[0] for report in reports]
    assert all(b < a for a, b in zip(first, first[1:]))
    assert max(reports[-1].weyl_rms) < max(reports[0].weyl_rms)


@pytest.mark.acceptance
def test_semigroup_characters_decay_with_oscillation():
    """Character averages of the lps5 pair shrink inside a decaying envelope."""
    system = words.lps_system()
    reports = {
        n: sphstat.character_experiment(system, n, l_max=2, threads=4)
        for n in (10, 14, 18, 20)
    }
    assert abs(reports[20].char[0]) <= abs(reports[10].char[0]) / 2
    assert abs(reports[20].char[0]) <= 0.05
    assert abs(reports[20].char[1]) <= 0.05
    assert abs(reports[20].char[1]) <= abs(reports[14].char[1])


@pytest.mark.acceptance
def test_group_characters_are_small_at_n_10():
    """Reduced words of length 10 average below 0.05 for l = 1..4."""
    report = sphstat.character_experiment(
        words.lps_system(GeneratorMode.GROUP), 10, l_max=4, threads=4
    )
    assert max(abs(value) for value in report.char) <= 0.05


@pytest.mark.acceptance
def test_single_rotation_characters_stay_large_at_n_20():
    """Powers of one irrational rotation keep chi_l(20 alpha), never decaying."""
    alpha = 2 * math.pi * (math.sqrt(5) - 1) / 2
    system = GeneratorSystem(
        (UnitQuaternion.from_axis_angle((0.0, 0.0, 1.0), alpha),)
    )
    report = sphstat.character_experiment(system, 20, l_max=4)
    expected = [closed_form_character(20 * alpha, l) for l in range(1, 5)]
    assert report.char == pytest.approx(expected, abs=1e-9)
    assert max(abs(value) for value in report.char) > 0.05
