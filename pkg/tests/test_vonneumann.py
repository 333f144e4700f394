"""Dense kernel layer: rank-1 consistency, conservation, point particles."""

import numpy as np
import pytest

from kvhsim.grid import FD4, PhaseGrid, ScalarField
from kvhsim.hamiltonian import scenario_hamiltonian
from kvhsim.kvh import apply_prequantum, gaussian_wavepacket, kvh_energy
from kvhsim.madelung import HydroState, hydro_from_wavefunction
from kvhsim.vonneumann import (
    KernelError,
    VNKernel,
    density_centroid,
    derivative_matrices,
    evolve_kernel,
    hydro_from_kernel,
    kernel_energy,
    kernel_from_wavefunction,
    kernel_propagator,
    point_particle_kernel,
    prequantum_matrix,
    sigma_defect,
    _upsample2,
)


def coarse_grid(bc="periodic"):
    return PhaseGrid(-4, 4, -4, 4, 24, 24, bc)


def centered_grid():
    # nodes symmetric under (q, p) -> (-p, q); see the quarter-turn tests
    h = 8.0 / 24
    return PhaseGrid(-4 + h / 2, 4 + h / 2, -4 + h / 2, 4 + h / 2, 24, 24, FD4)


def packet(g):
    return gaussian_wavepacket(g, center=(1.0, 0.0), sigma=(0.7, 0.7))


def delta_like(g, hbar=16.0):
    eps = 4 * g.dq
    env = np.exp(-((g.Q - 1.0) ** 2 + g.P**2) / (2 * eps**2))
    D = ScalarField(g, env / np.real(g.integrate_values(env)))
    return D, point_particle_kernel(D, hbar=hbar)


class TestKernelBasics:
    def test_rank1_kernel_properties(self):
        g = coarse_grid()
        theta = kernel_from_wavefunction(packet(g))
        assert theta.trace() == pytest.approx(1.0, abs=1e-12)
        assert theta.hermiticity_residual() < 1e-14
        ev = theta.eigenvalues()
        assert ev[-1] == pytest.approx(1.0, abs=1e-10)
        assert np.max(np.abs(ev[:-1])) < 1e-10

    def test_unnormalized_rejected(self):
        g = coarse_grid()
        psi = packet(g)
        psi.field.values *= 2.0
        with pytest.raises(KernelError):
            kernel_from_wavefunction(psi)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(KernelError):
            VNKernel(coarse_grid(), np.zeros((10, 10), complex))

    def test_casimir_of_rank1(self):
        g = coarse_grid()
        theta = kernel_from_wavefunction(packet(g))
        assert theta.casimir(2) == pytest.approx(1.0, abs=1e-10)
        assert theta.casimir(3) == pytest.approx(1.0, abs=1e-10)


class TestOperatorDiscretization:
    def test_matrix_matches_operator_on_periodic_grid(self):
        g = coarse_grid()
        H = scenario_hamiltonian("harmonic")
        psi = packet(g)
        L = prequantum_matrix(H, g)
        via_matrix = (L @ psi.field.values.reshape(-1)).reshape(24, 24)
        via_op = apply_prequantum(H, psi).field.values
        np.testing.assert_allclose(via_matrix, via_op, atol=1e-10)

    def test_kernel_energy_matches_wavefunction_energy(self):
        g = coarse_grid()
        H = scenario_hamiltonian("harmonic")
        psi = packet(g)
        theta = kernel_from_wavefunction(psi)
        assert kernel_energy(theta, H) == pytest.approx(kvh_energy(H, psi), abs=1e-10)

    def test_derivative_matrices_match_grid(self):
        rng = np.random.default_rng(7)
        for bc in ("periodic", "fd4"):
            g = coarse_grid(bc)
            f = rng.standard_normal((24, 24))
            Dq, Dp = derivative_matrices(g)
            np.testing.assert_allclose(
                (Dq @ f.reshape(-1)).reshape(24, 24), g.ddq(f), atol=1e-10
            )
            np.testing.assert_allclose(
                (Dp @ f.reshape(-1)).reshape(24, 24), g.ddp(f), atol=1e-10
            )

    def test_upsample_exact_on_polynomials(self):
        # 8-point midpoint stencils are exact through degree 7
        g = coarse_grid()
        x = np.linspace(0, 1, 24)
        f = (x**5 - x**3)[:, None] * (1 + x**2)[None, :]
        fine = _upsample2(f)
        np.testing.assert_allclose(fine[0::2, 0::2], f, atol=1e-14)
        xm = x + 0.5 * (x[1] - x[0])
        fm = (xm**5 - xm**3)[:, None] * (1 + x**2)[None, :]
        np.testing.assert_allclose(fine[1::2, 0::2], fm, atol=1e-11)


class TestEvolution:
    def test_rank1_tracks_wavefunction(self):
        g = coarse_grid()
        H = scenario_hamiltonian("harmonic")
        psi0 = packet(g)
        theta_t = evolve_kernel(kernel_from_wavefunction(psi0), H, 0.1, 5e-3)
        from kvhsim.kvh import evolve

        psi_t = evolve(H, psi0, 0.1, 5e-3, record_energy=False).final()
        v = psi_t.field.values.reshape(-1)
        ref = np.outer(v, v.conj())
        assert np.max(np.abs(theta_t.K - ref)) < 1e-7

    def test_conserved_quantities(self):
        g = coarse_grid()
        H = scenario_hamiltonian("harmonic")
        theta0 = kernel_from_wavefunction(packet(g))
        theta_t = evolve_kernel(theta0, H, 0.2, 5e-3)
        assert abs(theta_t.trace() - 1.0) < 1e-12
        assert abs(theta_t.casimir(2) - theta0.casimir(2)) < 1e-10
        assert theta_t.hermiticity_residual() < 1e-12

    def test_unknown_method(self):
        g = coarse_grid()
        theta = kernel_from_wavefunction(packet(g))
        with pytest.raises(ValueError):
            evolve_kernel(theta, scenario_hamiltonian("free"), 0.1, 1e-2, method="euler")

    def test_characteristics_propagator_unitary_on_rotation(self):
        g = centered_grid()
        H = scenario_hamiltonian("harmonic")
        U = kernel_propagator(H, g, np.pi / 2, hbar=16.0, dt=5e-3)
        # quarter turn maps the centered node set onto itself: U is a
        # phase times a permutation, hence exactly unitary
        resid = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
        assert resid < 1e-9


class TestPointParticle:
    def test_density_validation(self):
        g = centered_grid()
        bad = ScalarField(g, -np.ones((24, 24)))
        with pytest.raises(KernelError):
            point_particle_kernel(bad)
        unnorm = ScalarField(g, np.ones((24, 24)))
        with pytest.raises(KernelError):
            point_particle_kernel(unnorm)

    def test_kernel_structure(self):
        g = centered_grid()
        D, theta = delta_like(g)
        assert theta.hermiticity_residual() < 1e-13
        state = hydro_from_kernel(theta)
        # kernel diagonal reproduces the target density exactly
        np.testing.assert_allclose(state.D.values, D.values, atol=1e-13)
        assert sigma_defect(state) < 1e-5

    def test_centroid(self):
        g = centered_grid()
        D, theta = delta_like(g)
        qc, pc = density_centroid(hydro_from_kernel(theta).D)
        # the truncated discrete Gaussian sits a small fraction of a cell
        # off its nominal center
        assert qc == pytest.approx(1.0, abs=0.25 * g.dq)
        assert pc == pytest.approx(0.0, abs=0.25 * g.dp)

    def test_sigma_defect_zero_for_exact_structure(self):
        g = centered_grid()
        D, _ = delta_like(g)
        from kvhsim.hamiltonian import OneForm

        sigma = OneForm(ScalarField(g, g.P * D.values), ScalarField(g, 0 * g.P))
        assert sigma_defect(HydroState(sigma, D)) == 0.0

    def test_quarter_turn_preserves_structure(self):
        g = centered_grid()
        D, theta0 = delta_like(g)
        H = scenario_hamiltonian("harmonic")
        theta_t = evolve_kernel(theta0, H, np.pi / 2, 5e-3, method="characteristics")
        d0 = sigma_defect(hydro_from_kernel(theta0))
        d1 = sigma_defect(hydro_from_kernel(theta_t))
        assert (d1 - d0) / (np.pi / 2) < 1e-4
        assert abs(theta_t.trace() - theta0.trace()) < 1e-12

    def test_extracted_sigma_matches_wavefunction_hydro(self):
        # rank-1 cross-check of the slot-derivative extraction
        g = coarse_grid()
        psi = gaussian_wavepacket(
            g, center=(0.5, 0.0), sigma=(0.8, 0.8), phase=lambda q, p: 0.2 * q
        )
        theta = kernel_from_wavefunction(psi)
        st_k = hydro_from_kernel(theta)
        st_w = hydro_from_wavefunction(psi)
        scale = np.max(np.abs(st_w.sigma.a_q.values))
        assert np.max(np.abs(st_k.sigma.a_q.values - st_w.sigma.a_q.values)) / scale < 1e-4
        np.testing.assert_allclose(st_k.D.values, st_w.D.values, atol=1e-12)
