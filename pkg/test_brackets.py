#!/usr/bin/env python3
"""
Parantezler Test Dosyası

Poisson ve kontakt parantezlerinin örnek değerleri, antisimetri, Jacobi
özdeşliği, Leibniz kusuru ve simplektik indirgeme testleri.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brackets import (
    BracketKind,
    antisymmetry_residual,
    bracket,
    bracket_function,
    contact_bracket,
    jacobi_residual,
    leibniz_defect,
    poisson_bracket,
    restrict_to_symplectic,
)
from geometry_core import Arity, ArityError, ContactState, PhaseState
from hamiltonians import coordinate_function, polynomial_from_terms, random_polynomial

SYM = Arity.SYMPLECTIC
CON = Arity.CONTACT

coordinate = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


class TestPoissonBracket:
    """Kanonik Poisson parantezi testleri"""

    def test_canonical_pair(self):
        q = coordinate_function(0, SYM, 1)
        p = coordinate_function(1, SYM, 1)
        assert poisson_bracket(q, p, PhaseState([0.3], [-1.2])) == 1.0

    def test_self_bracket_is_zero(self, rng):
        H = random_polynomial(rng, SYM, 1, 4)
        assert poisson_bracket(H, H, PhaseState([0.4], [0.9])) == pytest.approx(0.0, abs=1e-14)

    def test_quadratic_example(self):
        F = polynomial_from_terms({(2, 0): 0.5}, SYM, 1)
        H = polynomial_from_terms({(0, 2): 0.5}, SYM, 1)
        assert poisson_bracket(F, H, PhaseState([2.0], [3.0])) == pytest.approx(6.0)

    def test_vectorized_over_mesh(self):
        F = polynomial_from_terms({(2, 0): 0.5}, SYM, 1)
        H = polynomial_from_terms({(0, 2): 0.5}, SYM, 1)
        mesh = np.stack(np.meshgrid(np.linspace(-1, 1, 6), np.linspace(-2, 2, 5), indexing="ij"))
        np.testing.assert_allclose(poisson_bracket(F, H, mesh), mesh[0] * mesh[1])

    def test_arity_mismatch(self):
        F = coordinate_function(0, SYM, 1)
        G = coordinate_function(0, CON, 1)
        with pytest.raises(ArityError):
            poisson_bracket(F, G, PhaseState([0.0], [0.0]))
        with pytest.raises(ArityError):
            poisson_bracket(F, F, ContactState([0.0], [0.0], 0.0))

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, q=coordinate, p=coordinate)
    def test_antisymmetry(self, seed, q, p):
        rng = np.random.default_rng(seed)
        F = random_polynomial(rng, SYM, 1, 4)
        H = random_polynomial(rng, SYM, 1, 4)
        assert antisymmetry_residual(BracketKind.SYMPLECTIC, F, H, [PhaseState([q], [p])]) <= 1e-12

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, a=st.floats(min_value=-3.0, max_value=3.0), q=coordinate, p=coordinate)
    def test_linearity_in_first_argument(self, seed, a, q, p):
        rng = np.random.default_rng(seed)
        F, G, H = (random_polynomial(rng, SYM, 1, 3) for _ in range(3))
        s = PhaseState([q], [p])
        combined = poisson_bracket(a * F + G, H, s)
        expected = a * poisson_bracket(F, H, s) + poisson_bracket(G, H, s)
        assert combined == pytest.approx(expected, abs=1e-10)


class TestContactBracket:
    """Kontakt (Jacobi) parantezi testleri"""

    def test_canonical_pair(self):
        q = coordinate_function(0, CON, 1)
        p = coordinate_function(1, CON, 1)
        assert contact_bracket(q, p, ContactState([0.7], [0.2], -1.0)) == pytest.approx(1.0)

    def test_z_against_z_independent_hamiltonian(self, rng):
        z = coordinate_function(2, CON, 1)
        H = polynomial_from_terms({(2, 0, 0): 0.5, (0, 2, 0): 0.5, (1, 1, 0): 0.3}, CON, 1)
        x = np.array([0.4, -1.1, 2.0])
        hp = H.gradient(x)[1]
        expected = x[1] * hp - H(x)
        assert contact_bracket(z, H, x) == pytest.approx(expected, abs=1e-12)

    def test_self_bracket_is_zero(self, rng):
        H = random_polynomial(rng, CON, 1, 4)
        assert contact_bracket(H, H, [0.1, 0.2, 0.3]) == pytest.approx(0.0, abs=1e-13)

    def test_dispatch(self):
        q = coordinate_function(0, CON, 1)
        p = coordinate_function(1, CON, 1)
        assert bracket("contact", q, p, [0.0, 0.0, 0.0]) == contact_bracket(q, p, [0.0, 0.0, 0.0])

    def test_symplectic_function_rejected(self):
        with pytest.raises(ArityError):
            contact_bracket(coordinate_function(0, SYM, 1), coordinate_function(1, SYM, 1), [0.0, 0.0])

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, q=coordinate, p=coordinate, z=coordinate)
    def test_antisymmetry(self, seed, q, p, z):
        rng = np.random.default_rng(seed)
        F = random_polynomial(rng, CON, 1, 4)
        H = random_polynomial(rng, CON, 1, 4)
        assert antisymmetry_residual("contact", F, H, [ContactState([q], [p], z)]) <= 1e-12

    def test_leibniz_defect_identity(self, rng):
        for _ in range(50):
            F, G, H = (random_polynomial(rng, CON, 1, 3) for _ in range(3))
            x = rng.uniform(-1.0, 1.0, size=3)
            assert abs(leibniz_defect(F, G, H, x)) <= 1e-8

    def test_reduces_to_poisson_for_z_independent(self, rng):
        for _ in range(20):
            coeffs_f = rng.uniform(-1.0, 1.0, size=(4, 4, 1))
            coeffs_h = rng.uniform(-1.0, 1.0, size=(4, 4, 1))
            terms_f = {(i, j, 0): coeffs_f[i, j, 0] for i in range(4) for j in range(4)}
            terms_h = {(i, j, 0): coeffs_h[i, j, 0] for i in range(4) for j in range(4)}
            F = polynomial_from_terms(terms_f, CON, 1)
            H = polynomial_from_terms(terms_h, CON, 1)
            x = rng.uniform(-1.0, 1.0, size=3)
            restricted = poisson_bracket(restrict_to_symplectic(F), restrict_to_symplectic(H), x[:2])
            assert contact_bracket(F, H, x) == pytest.approx(restricted, abs=1e-12)


class TestJacobi:
    """Jacobi özdeşliği testleri"""

    def test_symplectic_example(self, rng):
        q = coordinate_function(0, SYM, 1)
        p = coordinate_function(1, SYM, 1)
        qp = polynomial_from_terms({(1, 1): 1.0}, SYM, 1)
        states = list(rng.uniform(-2.0, 2.0, size=(100, 2)))
        assert jacobi_residual(BracketKind.SYMPLECTIC, q, p, qp, states) <= 1e-6

    def test_contact_example(self, rng):
        q, p, z = (coordinate_function(k, CON, 1) for k in range(3))
        states = list(rng.uniform(-2.0, 2.0, size=(20, 3)))
        assert jacobi_residual(BracketKind.CONTACT, q, p, z, states) <= 1e-6

    def test_degenerate_arguments(self, rng):
        F = random_polynomial(rng, SYM, 1, 3)
        H = random_polynomial(rng, SYM, 1, 3)
        assert jacobi_residual("symplectic", F, F, H, [[0.3, 0.4]]) <= 1e-8

    @pytest.mark.parametrize("kind,arity,dim", [("symplectic", SYM, 2), ("contact", CON, 3)])
    def test_random_polynomials(self, rng, kind, arity, dim):
        for _ in range(10):
            F, G, H = (random_polynomial(rng, arity, 1, 3) for _ in range(3))
            states = list(rng.uniform(-0.5, 0.5, size=(5, dim)))
            assert jacobi_residual(kind, F, G, H, states) <= 1e-6

    def test_requires_states(self):
        F = coordinate_function(0, SYM, 1)
        with pytest.raises(ValueError):
            jacobi_residual("symplectic", F, F, F, [])

    def test_bracket_function_value(self):
        F = polynomial_from_terms({(2, 0): 0.5}, SYM, 1)
        H = polynomial_from_terms({(0, 2): 0.5}, SYM, 1)
        K = bracket_function("symplectic", F, H)
        assert K([2.0, 3.0]) == pytest.approx(6.0)
        np.testing.assert_allclose(K.gradient([2.0, 3.0]), [3.0, 2.0], rtol=1e-7)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
