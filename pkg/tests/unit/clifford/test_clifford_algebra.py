"""
Tests for the two-dimensional spinor algebra.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spinframe.clifford import (GAMMA1, GAMMA2, OMEGA, OMEGA2, Spinor, TangentVec2, bar,
                                clifford_mul, gamma_matrix, herm, norm2, omega2_mul, omega_mul,
                                re_herm, split)
from tests.utils import random_spinors, random_tangents

finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
vectors = arrays(np.float64, (2,), elements=finite)
spinor_parts = arrays(np.float64, (4,), elements=finite)


def as_spinor(parts):
    return np.array([parts[0] + 1j * parts[1], parts[2] + 1j * parts[3]])


@settings(max_examples=200, deadline=None)
@given(X=vectors, Y=vectors, parts=spinor_parts)
def test_clifford_relation(X, Y, parts):
    phi = as_spinor(parts)
    lhs = clifford_mul(X, clifford_mul(Y, phi)) + clifford_mul(Y, clifford_mul(X, phi))
    scale = 1.0 + np.abs(X).max() * np.abs(Y).max() * np.abs(phi).max()
    assert np.allclose(lhs, -2.0 * np.dot(X, Y) * phi, atol=1e-13 * scale, rtol=0.0)


@settings(max_examples=200, deadline=None)
@given(X=vectors, parts=spinor_parts, other=spinor_parts)
def test_clifford_multiplication_is_skew_adjoint(X, parts, other):
    phi, psi = as_spinor(parts), as_spinor(other)
    scale = 1.0 + np.abs(X).max() * np.abs(phi).max() * np.abs(psi).max()
    assert abs(herm(clifford_mul(X, phi), psi) + herm(phi, clifford_mul(X, psi))) <= 1e-13 * scale


@settings(max_examples=200, deadline=None)
@given(a=finite, b=finite, c=finite, parts=spinor_parts)
def test_real_forms_have_vanishing_real_product(a, b, c, parts):
    """Re<beta . psi, psi> = 0 for beta a real combination of e1, e2 and omega."""
    psi = as_spinor(parts)
    beta_psi = clifford_mul([a, b], psi) + c * omega_mul(psi)
    scale = 1.0 + max(abs(a), abs(b), abs(c)) * np.abs(psi).max() ** 2
    assert abs(re_herm(beta_psi, psi)) <= 1e-13 * scale


def test_bulk_identities(rng):
    """The algebraic identities on 10^4 random instances at once."""
    phi = random_spinors(rng, (10000,))
    X = random_tangents(rng, (10000,))
    Y = random_tangents(rng, (10000,))
    relation = (clifford_mul(X, clifford_mul(Y, phi)) + clifford_mul(Y, clifford_mul(X, phi))
                + 2.0 * np.sum(X * Y, axis=-1)[..., None] * phi)
    assert np.max(np.abs(relation)) <= 1e-12
    assert np.max(np.abs(omega_mul(omega_mul(phi)) + phi)) <= 1e-13
    assert np.max(np.abs(re_herm(clifford_mul(X, phi), phi))) <= 1e-12
    assert np.max(np.abs(re_herm(omega_mul(phi), phi))) <= 1e-12


def test_reference_representation():
    assert np.array_equal(clifford_mul([1.0, 0.0], np.array([1.0, 0.0])), np.array([0.0, 1j]))
    assert np.array_equal(omega_mul(np.array([1.0, 0.0])), np.array([-1j, 0.0]))
    assert np.allclose(OMEGA, np.diag([-1j, 1j]))
    assert np.allclose(OMEGA2, np.diag([1.0, -1.0]))
    assert np.allclose(gamma_matrix([2.0, -1.0]), 2.0 * GAMMA1 - GAMMA2)


def test_zero_vector_acts_as_zero(rng):
    phi = random_spinors(rng)
    assert np.array_equal(clifford_mul([0.0, 0.0], phi), np.zeros(2))


def test_e1_squares_to_minus_identity(rng):
    phi = random_spinors(rng)
    assert np.allclose(clifford_mul([1.0, 0.0], clifford_mul([1.0, 0.0], phi)), -phi)


def test_omega_anticommutes_with_vectors(rng):
    phi = random_spinors(rng)
    X = random_tangents(rng)
    assert np.allclose(omega_mul(clifford_mul(X, phi)) + clifford_mul(X, omega_mul(phi)), 0.0)


def test_split_is_eigen_decomposition(rng):
    phi = random_spinors(rng, (5,))
    plus, minus = split(phi)
    assert np.array_equal(plus + minus, phi)
    assert np.allclose(omega2_mul(plus), plus)
    assert np.allclose(omega2_mul(minus), -minus)
    assert np.array_equal(split(plus)[0], plus)
    assert np.allclose(bar(phi), plus - minus)


def test_vectors_exchange_half_spinors(rng):
    plus, _ = split(random_spinors(rng))
    image_plus, image_minus = split(clifford_mul(random_tangents(rng), plus))
    assert np.array_equal(image_plus, np.zeros(2))
    assert np.linalg.norm(image_minus) > 0.0


def test_bar_of_positive_spinor():
    phi = np.array([0.3 - 0.2j, 0.0])
    assert np.array_equal(bar(phi), phi)


def test_norm_and_hermitian_product(rng):
    phi = random_spinors(rng)
    assert herm(phi, phi).imag == pytest.approx(0.0, abs=1e-15)
    assert herm(phi, phi).real == pytest.approx(float(norm2(phi)))


class TestWrappers:
    """Spinor and TangentVec2 wrappers."""

    def test_seed_round_trip(self):
        spinor = Spinor.from_seed([0.6, 0.0, 0.8, -0.1])
        assert spinor.to_seed() == pytest.approx([0.6, 0.0, 0.8, -0.1])
        assert float(spinor.norm2()) == pytest.approx(1.01)

    def test_seed_length(self):
        with pytest.raises(ValueError):
            Spinor.from_seed([1.0, 0.0])

    def test_operations_keep_wrapper(self):
        spinor = Spinor(np.array([1.0, 1j]), point=(2, 3))
        image = clifford_mul(TangentVec2([1.0, 0.0], point=(2, 3)), spinor)
        assert isinstance(image, Spinor)
        assert image.point == (2, 3)
        plus, minus = spinor.split()
        assert plus.allclose(np.array([1.0, 0.0]))
        assert minus.allclose(np.array([0.0, 1j]))

    def test_points_must_agree(self):
        spinor = Spinor(np.array([1.0, 0.0]), point=(0, 0))
        with pytest.raises(ValueError):
            clifford_mul(TangentVec2([1.0, 0.0], point=(0, 1)), spinor)

    def test_shapes_are_checked(self):
        with pytest.raises(ValueError):
            Spinor(np.zeros(3))
        with pytest.raises(ValueError):
            TangentVec2(np.zeros(3))

    def test_tangent_dot(self):
        X = TangentVec2([3.0, 4.0])
        assert float(X.norm2()) == 25.0
        assert float(X.dot(TangentVec2([1.0, 0.0]))) == 3.0
