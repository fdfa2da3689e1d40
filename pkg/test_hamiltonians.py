#!/usr/bin/env python3
"""
Hamiltonyen Fonksiyonlar Test Dosyası

Polinom oluşturma, terim listesi çözümleme, plazma Hamiltonyeni ve
ada göre Hamiltonyen seçimi testleri.
"""

import numpy as np
import pytest

from geometry_core import Arity, ArityError
from hamiltonians import (
    PlasmaHamiltonian,
    build_hamiltonian,
    constant_function,
    harmonic_oscillator,
    parse_terms,
    polynomial_from_terms,
    random_polynomial,
)


class TestPolynomial:
    """Polinom ScalarFunction testleri"""

    def test_value_and_gradient(self):
        H = polynomial_from_terms({(2, 0): 0.5, (0, 2): 0.5, (1, 1): 2.0}, Arity.SYMPLECTIC, 1)
        assert H([1.0, 3.0]) == pytest.approx(0.5 + 4.5 + 6.0)
        np.testing.assert_allclose(H.gradient([1.0, 3.0]), [1.0 + 6.0, 3.0 + 2.0])

    def test_wrong_exponent_count(self):
        with pytest.raises(ArityError):
            polynomial_from_terms({(1, 0): 1.0}, Arity.CONTACT, 1)

    def test_empty_terms_is_zero(self):
        H = polynomial_from_terms({}, Arity.CONTACT, 1)
        assert H([1.0, 2.0, 3.0]) == 0.0

    def test_derivative_and_degree(self):
        H = polynomial_from_terms({(3, 1): 2.0}, Arity.SYMPLECTIC, 1)
        assert H.degree == 4
        dq = H.derivative(0)
        assert dq([2.0, 5.0]) == pytest.approx(6.0 * 4.0 * 5.0)

    def test_constant(self):
        assert constant_function(2.5, Arity.CONTACT, 1)([9.0, 9.0, 9.0]) == 2.5

    def test_harmonic_oscillator_two_degrees(self):
        H = harmonic_oscillator(2)
        assert H([1.0, 2.0, 3.0, 4.0]) == pytest.approx(15.0)
        np.testing.assert_allclose(H.gradient([1.0, 2.0, 3.0, 4.0]), [1.0, 2.0, 3.0, 4.0])

    def test_random_polynomial_is_seeded(self):
        first = random_polynomial(np.random.default_rng(3), Arity.CONTACT, 1, 4)
        second = random_polynomial(np.random.default_rng(3), Arity.CONTACT, 1, 4)
        np.testing.assert_array_equal(first.coeffs, second.coeffs)
        assert first.degree <= 4
        assert np.max(np.abs(first.coeffs)) <= 1.0

    def test_mesh_evaluation(self):
        H = harmonic_oscillator(1, Arity.CONTACT)
        mesh = np.stack(np.meshgrid(np.linspace(-1, 1, 4), np.linspace(-1, 1, 3),
                                    np.linspace(0, 1, 2), indexing="ij"))
        np.testing.assert_allclose(H(mesh), 0.5 * (mesh[0] ** 2 + mesh[1] ** 2))
        assert H.gradient(mesh).shape == (3, 4, 3, 2)


class TestParseTerms:
    """Terim listesi çözümleme testleri"""

    def test_parse_harmonic(self):
        terms = parse_terms("2,0:0.5; 0,2:0.5", Arity.SYMPLECTIC)
        assert terms == {(2, 0): 0.5, (0, 2): 0.5}

    def test_repeated_terms_add(self):
        assert parse_terms("1,0,0:1; 1,0,0:2", Arity.CONTACT) == {(1, 0, 0): 3.0}

    @pytest.mark.parametrize("spec", ["2,0", "2:1", "-1,0:1", "1,0,0:1"])
    def test_invalid_terms(self, spec):
        with pytest.raises(ValueError):
            parse_terms(spec, Arity.SYMPLECTIC)


class TestPlasmaHamiltonian:
    """Dış potansiyelli plazma Hamiltonyeni testleri"""

    def test_free_particle(self):
        H = PlasmaHamiltonian(mass=2.0)
        assert H([5.0, 4.0]) == pytest.approx(4.0)

    @pytest.mark.parametrize("potential", ["none", "harmonic", "cosine"])
    def test_gradient_matches_finite_differences(self, potential):
        H = PlasmaHamiltonian(mass=1.5, charge=-1.0, potential=potential,
                              amplitude=0.7, wavenumber=2.0, n=2)
        probes = list(np.random.default_rng(11).uniform(-2.0, 2.0, size=(10, 4)))
        assert H.gradient_mismatch(probes) < 1e-6

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            PlasmaHamiltonian(mass=0.0)
        with pytest.raises(ValueError):
            PlasmaHamiltonian(potential="yukawa")


class TestBuildHamiltonian:
    """Ada göre Hamiltonyen seçimi testleri"""

    def test_named_choices(self):
        assert build_hamiltonian("harmonic")([1.0, 1.0]) == pytest.approx(1.0)
        H = build_hamiltonian("polynomial", Arity.CONTACT, terms="0,2,0:0.5; 0,0,1:-0.1")
        assert H([0.0, 2.0, 1.0]) == pytest.approx(1.9)
        plasma = build_hamiltonian("plasma", potential="harmonic", amplitude=2.0)
        assert plasma([1.0, 0.0]) == pytest.approx(1.0)

    def test_plasma_requires_symplectic(self):
        with pytest.raises(ArityError):
            build_hamiltonian("plasma", Arity.CONTACT)

    def test_polynomial_requires_terms(self):
        with pytest.raises(ValueError):
            build_hamiltonian("polynomial")

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            build_hamiltonian("kepler")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
