#!/usr/bin/env python3
"""
Yükseltmeler ve Lie Cebiri Test Dosyası

Kotanjant yükseltmeleri, vektör alanı parantezi, homomorfizma artıkları
ve cebir doğrulama takımı testleri.
"""

import numpy as np
import pytest

from geometry_core import Arity, ArityError
from hamiltonians import constant_function, coordinate_function, harmonic_oscillator, random_polynomial
from kinetic_density import _conformal_rate
from lifts_algebra import (
    BaseField,
    DivergenceError,
    _extension_residual,
    HomomorphismKind,
    LiftKind,
    complete_cotangent_lift,
    divergence_lift_bracket_residual,
    holonomic_part,
    homomorphism_residual,
    kappa_lift,
    lie_bracket_field,
    lifted_field,
    random_constant_divergence_field,
    run_algebra_suite,
    vector_field_bracket,
    vertical_representative,
    z_action_residual,
)

A = np.array([[1.0, 2.0], [0.5, -1.0]])
B = np.array([[0.0, -1.0], [3.0, 0.5]])


def linear_field(matrix, name="L"):
    return BaseField(2, lambda x: matrix @ x, lambda x: matrix, name)


@pytest.fixture
def rng():
    return np.random.default_rng(314)


class TestLifts:
    """Kotanjant yükseltme testleri"""

    def test_complete_lift_of_linear_field(self):
        x, y = np.array([1.0, -2.0]), np.array([0.5, 3.0])
        np.testing.assert_allclose(complete_cotangent_lift(linear_field(A), x, y),
                                   np.concatenate([A @ x, -A.T @ y]))

    def test_kappa_of_divergence_free_field_is_complete_lift(self):
        rotation = linear_field(np.array([[0.0, -1.0], [1.0, 0.0]]))
        x, y = np.array([0.3, 0.4]), np.array([1.0, 2.0])
        np.testing.assert_allclose(kappa_lift(rotation, x, y), complete_cotangent_lift(rotation, x, y))

    def test_kappa_of_euler_field(self):
        euler = linear_field(np.eye(2), "E")
        x, y = np.array([1.0, 2.0]), np.array([3.0, -1.0])
        np.testing.assert_allclose(kappa_lift(euler, x, y), [1.0, 2.0, -9.0, 3.0])

    def test_kappa_requires_constant_divergence(self):
        squared = BaseField(2, lambda x: np.array([x[0] ** 2, 0.0]), name="Q")
        with pytest.raises(DivergenceError):
            kappa_lift(squared, [1.0, 0.0], [1.0, 1.0])

    def test_vertical_representative(self):
        euler = linear_field(np.eye(2), "E")
        section = BaseField(2, lambda x: np.array([1.0, 0.0]), lambda x: np.zeros((2, 2)), "y")
        np.testing.assert_allclose(vertical_representative(euler, section, [0.2, 0.7]), [-3.0, 0.0])

    def test_holonomic_part(self):
        X = linear_field(A)
        x = np.array([1.0, 1.0])
        y_x = np.array([[1.0, 0.0], [0.0, 2.0]])
        np.testing.assert_allclose(holonomic_part(X, x, [0.0, 0.0], y_x),
                                   np.concatenate([A @ x, y_x @ (A @ x)]))

    def test_jet_lifts_are_not_fields(self):
        with pytest.raises(ValueError):
            lifted_field(linear_field(A), LiftKind.HOLONOMIC_PART)

    def test_point_dimension_checked(self):
        with pytest.raises(ArityError):
            complete_cotangent_lift(linear_field(A), [1.0, 2.0, 3.0], [0.0, 0.0])


class TestVectorFieldBracket:
    """Jacobi–Lie parantezi testleri"""

    def test_linear_fields(self):
        x = np.array([0.7, -1.3])
        expected = B @ A @ x - A @ B @ x
        np.testing.assert_allclose(vector_field_bracket(lambda v: A @ v, lambda v: B @ v, x), expected,
                                   atol=1e-10)

    def test_bracket_field_matches_directional_bracket(self):
        X, Y = linear_field(A, "X"), linear_field(B, "Y")
        x = np.array([0.1, 0.9])
        np.testing.assert_allclose(lie_bracket_field(X, Y)(x), vector_field_bracket(X, Y, x), atol=1e-10)

    def test_antisymmetry(self, rng):
        X = random_constant_divergence_field(rng, "X")
        Y = random_constant_divergence_field(rng, "Y")
        x = rng.uniform(-1.0, 1.0, size=2)
        np.testing.assert_allclose(vector_field_bracket(X, Y, x), -vector_field_bracket(Y, X, x), atol=1e-12)

    def test_random_fields_have_constant_divergence(self, rng):
        X = random_constant_divergence_field(rng)
        probes = list(rng.uniform(-2.0, 2.0, size=(20, 2)))
        assert X.divergence_spread(probes) < 1e-12


class TestHomomorphisms:
    """Lie cebiri homomorfizması artıkları"""

    def test_ham_coordinate_functions(self):
        q = coordinate_function(0, Arity.SYMPLECTIC, 1)
        p = coordinate_function(1, Arity.SYMPLECTIC, 1)
        assert homomorphism_residual("ham", (q, p), [[0.3, 0.2], [-1.0, 0.5]]) <= 1e-10

    def test_contact_z_and_p(self):
        z = coordinate_function(2, Arity.CONTACT, 1)
        p = coordinate_function(1, Arity.CONTACT, 1)
        assert homomorphism_residual("contact", (z, p), [[0.3, 0.2, 0.1], [-1.0, 0.5, 2.0]]) <= 1e-6

    @pytest.mark.parametrize("c_f,c_h", [(0.3, -0.7), (-0.7, 0.3), (0.3, 0.3)])
    def test_conformal_random_polynomials(self, rng, c_f, c_h):
        F = random_polynomial(rng, Arity.SYMPLECTIC, 1, 3)
        H = random_polynomial(rng, Arity.SYMPLECTIC, 1, 3)
        probes = list(rng.uniform(-1.0, 1.0, size=(5, 2)))
        assert homomorphism_residual("conformal", ((F, c_f), (H, c_h)), probes) <= 1e-6

    def test_kappa_random_fields(self, rng):
        X = random_constant_divergence_field(rng, "X")
        Y = random_constant_divergence_field(rng, "Y")
        probes = list(rng.uniform(-1.0, 1.0, size=(5, 4)))
        assert homomorphism_residual(HomomorphismKind.KAPPA, (X, Y), probes) <= 1e-6

    def test_kappa_rejects_non_constant_divergence(self):
        squared = BaseField(2, lambda x: np.array([x[0] ** 2, 0.0]), name="Q")
        with pytest.raises(DivergenceError):
            homomorphism_residual("kappa", (squared, linear_field(A)),
                                  [[0.1, 0.2, 0.3, 0.4], [1.5, 0.2, 0.3, 0.4]])

    @pytest.mark.parametrize("c_f, c_h", [(0.3, -0.7), (0.0, 0.3), (-0.7, 0.0)])
    def test_extension(self, rng, c_f, c_h):
        """Yoğunluk akışı (F, c_F) eşleşmesinde −∫ g·K dμ üretir"""
        f = random_polynomial(rng, Arity.SYMPLECTIC, 1, 3)
        F = random_polynomial(rng, Arity.SYMPLECTIC, 1, 3)
        H = random_polynomial(rng, Arity.SYMPLECTIC, 1, 3)
        probes = list(rng.uniform(-1.0, 1.0, size=(4, 2)))
        assert homomorphism_residual("extension", (f, (F, c_f), (H, c_h)), probes) <= 1e-6

    def test_extension_detects_wrong_conformal_coefficient(self):
        """Yoğunluk çekirdeğindeki c katsayısı bozulunca dualite artığı π·δc olur"""
        one = constant_function(1.0, Arity.SYMPLECTIC, 1)
        H = harmonic_oscillator()
        assert _extension_residual(one, one, -0.7, H, 0.3) <= 1e-10
        skewed = lambda v, g, s, c: _conformal_rate(v, g, s, 1.5 * c)
        gap = _extension_residual(one, one, -0.7, H, 0.3, rate=skewed)
        assert gap == pytest.approx(0.15 * np.pi, rel=1e-6)

    def test_threads_do_not_change_residual(self, rng):
        F = random_polynomial(rng, Arity.SYMPLECTIC, 1, 3)
        H = random_polynomial(rng, Arity.SYMPLECTIC, 1, 3)
        probes = list(rng.uniform(-1.0, 1.0, size=(6, 2)))
        assert (homomorphism_residual("ham", (F, H), probes, threads=1)
                == homomorphism_residual("ham", (F, H), probes, threads=3))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            homomorphism_residual("poisson", (), [[0.0, 0.0]])


class TestIdentities:
    """Ek özdeşlikler"""

    def test_z_action(self, rng):
        H = random_polynomial(rng, Arity.SYMPLECTIC, 1, 3)
        assert z_action_residual(H, list(rng.uniform(-1.0, 1.0, size=(5, 2)))) <= 1e-6

    def test_divergence_lift_commutes_with_complete_lift(self, rng):
        X = random_constant_divergence_field(rng)
        assert divergence_lift_bracket_residual(X, list(rng.uniform(-1.0, 1.0, size=(5, 4)))) <= 1e-8


class TestAlgebraSuite:
    """Tohumlu doğrulama takımı"""

    def test_suite_records(self):
        records = run_algebra_suite(seed=7, instances=3)
        assert [r["kind"] for r in records] == ["ham", "conformal", "contact", "kappa", "extension"]
        assert all(r["pass"] for r in records)
        assert all(r["seed"] == 7 and r["tolerance"] == 1e-6 for r in records)

    def test_suite_is_reproducible(self):
        first = run_algebra_suite(seed=11, instances=2)
        second = run_algebra_suite(seed=11, instances=2, threads=2)
        assert first == second

    @pytest.mark.slow
    def test_full_suite(self):
        assert all(r["pass"] for r in run_algebra_suite(seed=0, instances=100))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
