"""Tests for quaternion algebra, fixed points and characters."""

import math

import numpy as np
import pytest

from app.errors import InternalInconsistencyError
from app.models.geometry import AllOfSphere, IsolatedPair, SpherePoint, UnitQuaternion
from app.services import rotor


def rz(angle: float) -> UnitQuaternion:
    return UnitQuaternion.from_axis_angle((0.0, 0.0, 1.0), angle)


def rx(angle: float) -> UnitQuaternion:
    return UnitQuaternion.from_axis_angle((1.0, 0.0, 0.0), angle)


def close(q1: UnitQuaternion, q2: UnitQuaternion, tol: float = 1e-12) -> bool:
    return np.allclose(q1.as_array(), q2.as_array(), atol=tol)


def test_compose_with_conjugate_is_identity():
    """q times its conjugate is the identity."""
    q = UnitQuaternion.from_components(1.0, 2.0, -3.0, 0.5)
    assert close(rotor.compose(q, rotor.conjugate(q)), UnitQuaternion.identity())


def test_same_axis_angles_add():
    """Rz(a) Rz(b) = Rz(a + b)."""
    assert close(rotor.compose(rz(0.3), rz(0.9)), rz(1.2))


def test_orthogonal_axes_do_not_commute():
    """Rx(pi/2) Rz(pi/2) differs from Rz(pi/2) Rx(pi/2)."""
    a = rotor.compose(rx(math.pi / 2), rz(math.pi / 2))
    b = rotor.compose(rz(math.pi / 2), rx(math.pi / 2))
    assert not close(a, b, tol=1e-6)


def test_canonical_sign():
    """The representative has w > 0, or the first nonzero component positive."""
    q = UnitQuaternion.from_components(-1.0, 0.0, 0.0, 0.0)
    assert q == UnitQuaternion.identity()
    half_turn = UnitQuaternion.from_components(0.0, 0.0, -1.0, 0.0)
    assert half_turn.y == 1.0


def test_product_stays_unit():
    """Long products remain unit within tolerance."""
    q = UnitQuaternion.from_components(1.0, 2.0, 0.0, 0.0)
    product = UnitQuaternion.identity()
    for _ in range(1000):
        product = rotor.compose(product, q)
    norm_sq = sum(c * c for c in product.as_array())
    assert abs(norm_sq - 1.0) < 1e-12


def test_act_quarter_turn():
    """Rz(pi/2) takes the x-axis to the y-axis."""
    image = rotor.act(rz(math.pi / 2), SpherePoint(1.0, 0.0, 0.0))
    assert np.allclose(image.as_array(), [0.0, 1.0, 0.0], atol=1e-12)


def test_act_is_a_homomorphism():
    """act(q1 q2, v) = act(q1, act(q2, v))."""
    q1 = UnitQuaternion.from_components(1.0, 2.0, 0.0, 0.0)
    q2 = UnitQuaternion.from_components(1.0, 0.0, 0.0, 2.0)
    v = SpherePoint.from_vector(0.3, -0.2, 0.9)
    left = rotor.act(rotor.compose(q1, q2), v)
    right = rotor.act(q1, rotor.act(q2, v))
    assert np.allclose(left.as_array(), right.as_array(), atol=1e-12)


def test_rotation_angle():
    """Angles are recovered in [0, pi]; the identity has angle 0."""
    assert rotor.rotation_angle(UnitQuaternion.identity()) == 0.0
    assert rotor.rotation_angle(rz(1.0)) == pytest.approx(1.0, abs=1e-12)
    assert rotor.rotation_angle(rx(math.pi)) == pytest.approx(math.pi, abs=1e-12)


def test_fixed_point_set():
    """Identity fixes the sphere; a rotation fixes its antipodal axis pair."""
    assert isinstance(rotor.fixed_point_set(UnitQuaternion.identity()), AllOfSphere)
    fixed = rotor.fixed_point_set(rz(0.7))
    assert isinstance(fixed, IsolatedPair)
    assert np.allclose(fixed.u.as_array(), [0.0, 0.0, 1.0])
    assert np.allclose(fixed.v.as_array(), [0.0, 0.0, -1.0])


def test_fixed_point_set_tiny_angle_is_isolated():
    """Angles just above the tolerance still give an axis."""
    fixed = rotor.fixed_point_set(rz(1e-6))
    assert isinstance(fixed, IsolatedPair)


def test_fixed_point_set_rejects_axisless_rotation(mocker):
    """An angle above tolerance without a vector part is inconsistent."""
    mocker.patch.object(rotor, "rotation_angle", return_value=1.0)
    with pytest.raises(InternalInconsistencyError):
        rotor.fixed_point_set(UnitQuaternion.identity())


@pytest.mark.parametrize("l", [0, 1, 2, 5])
def test_character_at_identity(l):
    """chi_l(identity) = 2l + 1."""
    assert rotor.character(UnitQuaternion.identity(), l) == pytest.approx(2 * l + 1)


def test_character_closed_form():
    """chi_l(theta) = sin((2l+1) theta/2) / sin(theta/2)."""
    theta = 1.1
    expected = math.sin(7 * theta / 2) / math.sin(theta / 2)
    assert rotor.character(rz(theta), 3) == pytest.approx(expected, abs=1e-12)


def test_character_degree_range():
    """Degrees outside [0, 64] are rejected."""
    with pytest.raises(ValueError):
        rotor.character(UnitQuaternion.identity(), 65)


def test_batch_matches_scalar():
    """Batched products, actions and angles agree with the scalar versions."""
    q1 = UnitQuaternion.from_components(1.0, 2.0, 0.0, 0.0)
    q2 = UnitQuaternion.from_components(1.0, 0.0, -2.0, 0.0)
    batch = rotor.canonical_sign_batch(
        rotor.compose_batch(q1.as_array()[None, :], q2.as_array()[None, :])
    )
    scalar = rotor.compose(q1, q2)
    assert np.allclose(batch[0], scalar.as_array(), atol=1e-14)

    v = SpherePoint(0.0, 0.0, 1.0)
    acted = rotor.act_batch(batch, v.as_array())
    assert np.allclose(acted[0], rotor.act(scalar, v).as_array(), atol=1e-14)
    assert rotor.rotation_angle_batch(batch)[0] == pytest.approx(
        rotor.rotation_angle(scalar), abs=1e-14
    )


def test_axes_batch_counts_identities():
    """Identity rows are skipped and counted."""
    q = np.stack([UnitQuaternion.identity().as_array(), rz(0.5).as_array()])
    axes, identities = rotor.axes_batch(q)
    assert identities == 1
    assert np.allclose(axes, [[0.0, 0.0, 1.0]])


def test_characters_batch():
    """Rows are chi_1..chi_lmax."""
    angles = np.array([0.0, 1.1])
    chars = rotor.characters_batch(angles, 3)
    assert chars.shape == (3, 2)
    assert np.allclose(chars[:, 0], [3.0, 5.0, 7.0])
    assert chars[2, 1] == pytest.approx(rotor.character(rz(1.1), 3), abs=1e-12)
