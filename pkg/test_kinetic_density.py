#!/usr/bin/env python3
"""
Kinetik Yoğunluk Test Dosyası

Izgara tanımı, fark şablonları, Vlasov/konformal/kontakt sağ tarafları,
çözücü ve tanı fonksiyonları testleri.
"""

import numpy as np
import pytest

from geometry_core import Arity
from hamiltonians import constant_function, coordinate_function, harmonic_oscillator
from hierarchy import extend_hamiltonian
from kinetic_density import (
    MAX_CELLS,
    Axis,
    DensityGrid,
    GridError,
    GridSpec,
    KineticModel,
    KineticSolver,
    NonFiniteError,
    boundary_mass_fraction,
    check_boundary_mass,
    conformal_density_rhs,
    contact_density_rhs,
    convergence_order,
    derivative,
    gaussian_density,
    l2_norm,
    observable,
    observable_rate,
    sample_function,
    step_density,
    vlasov_rhs,
)


@pytest.fixture
def plane():
    """Her iki eksende periyodik (q, p) ızgarası"""
    return GridSpec.symplectic((-6.0, 6.0, 48), (-6.0, 6.0, 48), "periodic", "periodic")


@pytest.fixture
def contact_grid():
    return GridSpec.contact((-4.0, 4.0, 24), (-4.0, 4.0, 24), (-2.0, 2.0, 24))


def _rotation_error(cells: int, steps: int) -> float:
    """Harmonik akışın bir tam turu sonunda göreli L² hatası"""
    spec = GridSpec.symplectic((-8.0, 8.0, cells), (-8.0, 8.0, cells), "periodic", "periodic")
    f0 = gaussian_density(spec, center=[1.0, 0.0], width=[1.0, 1.0])
    solver = KineticSolver(KineticModel.vlasov(), harmonic_oscillator(1), spec)
    final, _ = solver.run(f0, 2.0 * np.pi / steps, steps, record_every=steps)
    return l2_norm(final.values - f0.values, spec) / l2_norm(f0.values, spec)


def _flux_mass_drift(cells: int, steps: int) -> float:
    spec = GridSpec.contact((-4.0, 4.0, cells), (-4.0, 4.0, cells), (-2.0, 2.0, cells))
    H = extend_hamiltonian(harmonic_oscillator(1), 0.1).function
    f0 = gaussian_density(spec, center=[0.5, 0.0, 0.0], width=[0.8, 0.8, 0.4])
    solver = KineticSolver(KineticModel.contact_vf(flux_form=True), H, spec)
    final, history = solver.run(f0, 0.12 / cells, steps, record_every=max(1, steps // 10))
    mass = history["mass"].to_numpy()
    return float(np.max(np.abs(mass - mass[0])) / mass[0])


class TestGridSpec:
    """Izgara tanımı testleri"""

    def test_cell_centers(self):
        axis = Axis("q", 0.0, 1.0, 10)
        assert axis.h == pytest.approx(0.1)
        np.testing.assert_allclose(axis.centers[:2], [0.05, 0.15])

    @pytest.mark.parametrize("lo,hi,cells", [(1.0, 1.0, 16), (2.0, 1.0, 16), (0.0, 1.0, 4)])
    def test_invalid_axis(self, lo, hi, cells):
        with pytest.raises(GridError):
            Axis("p", lo, hi, cells)

    def test_cell_cap(self):
        with pytest.raises(GridError) as excinfo:
            GridSpec.contact((0, 1, 1024), (0, 1, 1024), (0, 1, 1024))
        assert str(MAX_CELLS) in str(excinfo.value)

    def test_shapes_and_parts(self, contact_grid):
        assert contact_grid.shape == (24, 24, 24)
        assert contact_grid.arity == Arity.CONTACT
        assert contact_grid.mesh().shape == (3, 24, 24, 24)
        assert contact_grid.symplectic_part().shape == (24, 24)
        assert contact_grid.refined().shape == (48, 48, 48)
        with pytest.raises(GridError):
            contact_grid.require(Arity.SYMPLECTIC)

    def test_density_validation(self, plane):
        with pytest.raises(GridError):
            DensityGrid(plane, np.zeros((4, 4)))
        values = np.zeros(plane.shape)
        values[0, 0] = np.nan
        with pytest.raises(NonFiniteError):
            DensityGrid(plane, values)

    def test_gaussian_is_normalized(self, contact_grid):
        f = gaussian_density(contact_grid, center=[0.0, 0.0, 0.0], width=[1.0, 1.0, 0.5])
        assert f.mass() == pytest.approx(1.0)
        frame = f.to_frame()
        assert list(frame.columns) == ["q", "p", "z", "value"]
        assert len(frame) == contact_grid.total_cells


class TestStencils:
    """Fark şablonları testleri"""

    def test_periodic_fourth_order(self):
        errors, spacings = [], []
        for cells in (32, 64):
            x = (np.arange(cells) + 0.5) * 2 * np.pi / cells
            h = 2 * np.pi / cells
            errors.append(np.max(np.abs(derivative(np.sin(x), 0, h, "periodic") - np.cos(x))))
            spacings.append(h)
        assert errors[1] < 1e-5
        assert convergence_order(errors, spacings) > 3.8

    def test_truncated_exact_for_quartic(self):
        x = np.linspace(0.0, 1.0, 12)
        h = x[1] - x[0]
        values = x ** 4 - 2.0 * x ** 3 + x
        np.testing.assert_allclose(derivative(values, 0, h, "truncated"), 4 * x ** 3 - 6 * x ** 2 + 1,
                                   atol=1e-9)

    def test_derivative_along_second_axis(self):
        x = np.linspace(-1.0, 1.0, 16)
        values = np.tile(x ** 2, (5, 1))
        out = derivative(values, 1, x[1] - x[0], "truncated")
        np.testing.assert_allclose(out, np.tile(2 * x, (5, 1)), atol=1e-10)

    def test_sampling_independent_of_threads(self, contact_grid):
        H = extend_hamiltonian(harmonic_oscillator(1), 0.2).function
        np.testing.assert_array_equal(sample_function(H, contact_grid, threads=1),
                                      sample_function(H, contact_grid, threads=4))
        np.testing.assert_array_equal(sample_function(H.gradient, contact_grid, threads=1),
                                      sample_function(H.gradient, contact_grid, threads=3))


class TestRightHandSides:
    """Sağ taraf testleri"""

    def test_vlasov_rhs_convergence(self):
        def error(cells):
            spec = GridSpec.symplectic((-6.0, 6.0, cells), (-6.0, 6.0, cells), "periodic", "periodic")
            f = gaussian_density(spec, center=[0.5, 0.0], width=[1.0, 0.8])
            q, p = spec.mesh()
            fq = -(q - 0.5) / 1.0 ** 2 * f.values
            fp = -p / 0.8 ** 2 * f.values
            exact = q * fp - p * fq
            return l2_norm(vlasov_rhs(f, harmonic_oscillator(1)) - exact, spec), spec.axes[0].h

        (e1, h1), (e2, h2) = error(64), error(128)
        assert convergence_order([e1, e2], [h1, h2]) >= 3.5

    def test_symmetric_gaussian_is_stationary(self, plane):
        f = gaussian_density(plane, center=[0.0, 0.0], width=[1.0, 1.0])
        assert np.max(np.abs(vlasov_rhs(f, harmonic_oscillator(1)))) < 1e-3

    def test_conformal_zero_c_matches_vlasov(self, plane):
        f = gaussian_density(plane, center=[0.5, -0.3], width=[0.9, 0.7])
        H = harmonic_oscillator(1)
        rate, _ = conformal_density_rhs(f, H, 0.0)
        np.testing.assert_array_equal(rate.values, vlasov_rhs(f, H))

    def test_cstar_rate(self):
        spec = GridSpec.symplectic((-8.0, 8.0, 64), (-4.0, 4.0, 64), "periodic", "truncated")
        f = gaussian_density(spec, center=[0.0, 0.0], width=[1.0, 0.5])
        _, cstar_rate = conformal_density_rhs(f, harmonic_oscillator(1), 0.4)
        # ∫ f (q² − p²)/2
        assert cstar_rate == pytest.approx(0.375, rel=1e-6)

    def test_contact_variants_differ_by_hz_term(self, contact_grid):
        H = extend_hamiltonian(harmonic_oscillator(1), 0.3).function
        f = gaussian_density(contact_grid, center=[0.0, 0.0, 0.0], width=[1.0, 1.0, 0.5])
        vf = contact_density_rhs(f, H, "vector_field").values
        br = contact_density_rhs(f, H, "bracket").values
        # fark f̄·∂H̄/∂z
        np.testing.assert_allclose(br - vf, -0.3 * f.values, atol=1e-12)

    def test_flux_form_only_for_vector_field(self, contact_grid):
        H = extend_hamiltonian(harmonic_oscillator(1), 0.3).function
        f = gaussian_density(contact_grid, center=[0.0, 0.0, 0.0], width=[1.0, 1.0, 0.5])
        with pytest.raises(ValueError):
            contact_density_rhs(f, H, "bracket", flux_form=True)
        with pytest.raises(ValueError):
            KineticModel("conformal", 0.1, flux_form=True)

    def test_flux_form_matches_advective_form(self, contact_grid):
        H = extend_hamiltonian(harmonic_oscillator(1), 0.3).function
        f = gaussian_density(contact_grid, center=[0.0, 0.0, 0.0], width=[1.0, 1.0, 0.5])
        flux = contact_density_rhs(f, H, flux_form=True).values
        advective = contact_density_rhs(f, H).values
        scale = np.max(np.abs(advective))
        assert np.max(np.abs(flux - advective)) < 0.05 * scale

    @staticmethod
    def _flux_advective_gap(cells: int):
        spec = GridSpec.contact((-5.0, 5.0, cells), (-5.0, 5.0, cells), (-2.5, 2.5, cells),
                                "truncated", "truncated", "truncated")
        H = extend_hamiltonian(harmonic_oscillator(1), 0.3).function
        f = gaussian_density(spec, center=[0.3, 0.2, 0.0], width=[0.9, 0.9, 0.45])
        flux = contact_density_rhs(f, H, flux_form=True).values
        advective = contact_density_rhs(f, H).values
        return l2_norm(flux - advective, spec), spec.axes[0].h

    def test_flux_and_advective_forms_converge_together(self):
        (e1, h1), (e2, h2) = self._flux_advective_gap(32), self._flux_advective_gap(64)
        assert convergence_order([e1, e2], [h1, h2]) >= 3.3

    @pytest.mark.slow
    def test_flux_and_advective_forms_fourth_order(self):
        gaps = [self._flux_advective_gap(cells) for cells in (32, 64, 128)]
        assert convergence_order([e for e, _ in gaps], [h for _, h in gaps]) >= 3.5

    def test_wrong_grid_arity(self, plane, contact_grid):
        f = gaussian_density(plane, center=[0.0, 0.0], width=[1.0, 1.0])
        with pytest.raises(GridError):
            contact_density_rhs(f, extend_hamiltonian(harmonic_oscillator(1), 0.1).function)
        g = gaussian_density(contact_grid, center=[0.0, 0.0, 0.0], width=[1.0, 1.0, 1.0])
        with pytest.raises(GridError):
            vlasov_rhs(g, harmonic_oscillator(1))


class TestSolver:
    """KineticSolver testleri"""

    def test_rotation_returns_initial_data(self):
        assert _rotation_error(128, 1000) < 1e-2

    @pytest.mark.slow
    def test_rotation_returns_initial_data_fine_grid(self):
        assert _rotation_error(256, 2000) <= 1e-3

    def test_flux_form_mass_conservation(self):
        assert _flux_mass_drift(24, 100) <= 1e-10

    @pytest.mark.slow
    def test_flux_form_mass_conservation_fine_grid(self):
        assert _flux_mass_drift(64, 1000) <= 1e-10

    def test_conformal_mass_decay(self):
        spec = GridSpec.symplectic((-4.0, 4.0, 32), (-6.0, 6.0, 48))
        f0 = gaussian_density(spec, center=[0.0, 0.0], width=[0.7, 0.7])
        solver = KineticSolver(KineticModel.conformal(0.3), harmonic_oscillator(1), spec)
        final, history = solver.run(f0, 0.01, 100, record_every=10)
        # d/dt ∫f = −n·c·∫f
        assert final.mass() == pytest.approx(np.exp(-0.3), rel=1e-4)
        assert list(history.columns) == ["step", "t", "mass", "cstar", "min", "max"]
        assert history["step"].tolist() == list(range(0, 101, 10))
        assert final.cstar is not None

    def test_conformal_zero_c_reproduces_vlasov(self, plane):
        f0 = gaussian_density(plane, center=[1.0, 0.0], width=[0.8, 0.8])
        H = harmonic_oscillator(1)
        vlasov, _ = KineticSolver(KineticModel.vlasov(), H, plane).run(f0, 0.01, 20)
        conformal, _ = KineticSolver(KineticModel.conformal(0.0), H, plane).run(f0, 0.01, 20)
        np.testing.assert_array_equal(vlasov.values, conformal.values)
        assert vlasov.cstar is None
        assert conformal.cstar is not None

    def test_record_callback(self, plane):
        f0 = gaussian_density(plane, center=[0.0, 0.0], width=[1.0, 1.0])
        seen = []
        KineticSolver(KineticModel.vlasov(), harmonic_oscillator(1), plane).run(
            f0, 0.01, 7, record_every=3, on_record=lambda k, state: seen.append(k))
        assert seen == [0, 3, 6, 7]

    def test_cfl_violation_reported(self, plane):
        solver = KineticSolver(KineticModel.vlasov(), harmonic_oscillator(1), plane)
        bound = solver.cfl_bound()
        assert bound == pytest.approx(0.5 * 0.25 / 5.875)
        assert solver.check_cfl(0.5 * bound)
        assert not solver.check_cfl(2.0 * bound)

    def test_step_density_wrong_model_grid(self, plane):
        f0 = gaussian_density(plane, center=[0.0, 0.0], width=[1.0, 1.0])
        with pytest.raises(GridError):
            step_density(KineticModel.contact_bracket(), f0, harmonic_oscillator(1), 0.01)


class TestDiagnostics:
    """Gözlenebilir ve sınır tanıları testleri"""

    def test_observable_of_one_is_mass(self, contact_grid):
        f = gaussian_density(contact_grid, center=[0.0, 0.0, 0.0], width=[1.0, 1.0, 0.5])
        assert observable(f, constant_function(1.0, Arity.CONTACT, 1)) == pytest.approx(f.mass())

    def test_observable_rate_of_q(self, contact_grid):
        f = gaussian_density(contact_grid, center=[0.0, 0.5, 0.0], width=[1.0, 0.6, 0.5])
        H = harmonic_oscillator(1, Arity.CONTACT)
        q = coordinate_function(0, Arity.CONTACT, 1)
        p = coordinate_function(1, Arity.CONTACT, 1)
        # ξ_H̄(q) = ∂H̄/∂p = p
        assert observable_rate(f, q, H) == pytest.approx(observable(f, p), abs=1e-12)

    def test_observable_rate_matches_time_derivative(self):
        """Akı biçimli contact_vf adımlarında Ā(t)'nin merkezi farkı ∫ ξ_H̄(a)·f̄ dμ̄'ye eşit"""
        spec = GridSpec.contact((-5.0, 5.0, 40), (-5.0, 5.0, 40), (-2.5, 2.5, 40),
                                "truncated", "truncated", "truncated")
        H = extend_hamiltonian(harmonic_oscillator(1), 0.3).function
        a = coordinate_function(0, Arity.CONTACT, 1) * coordinate_function(1, Arity.CONTACT, 1)
        f = gaussian_density(spec, center=[0.5, 0.3, 0.0], width=[0.8, 0.8, 0.4])
        solver = KineticSolver(KineticModel.contact_vf(flux_form=True), H, spec)
        dt = 1e-3
        forward, backward = solver.step(f, dt), solver.step(f, -dt)
        rate = (observable(forward, a) - observable(backward, a)) / (2.0 * dt)
        assert rate == pytest.approx(observable_rate(f, a, H), rel=1e-5)

    def test_boundary_mass_fraction(self):
        spec = GridSpec.symplectic((0.0, 1.0, 10), (0.0, 1.0, 10))
        values = np.ones(spec.shape)
        assert boundary_mass_fraction(values, spec) == pytest.approx(0.6)
        assert boundary_mass_fraction(np.zeros(spec.shape), spec) == 0.0
        assert check_boundary_mass(DensityGrid(spec, values)) == pytest.approx(0.6)

    def test_convergence_order_validation(self):
        assert convergence_order([1e-2, 1e-2 / 16], [0.2, 0.1]) == pytest.approx(4.0)
        with pytest.raises(ValueError):
            convergence_order([1e-3], [0.1])
        with pytest.raises(ValueError):
            convergence_order([1e-3, 0.0], [0.1, 0.05])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
