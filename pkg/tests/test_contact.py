"""Strict contact transformations and the unitary van Hove action."""

import numpy as np
import pytest

from kvhsim.contact import (
    apply_van_hove,
    equivariance_residual,
    lift_hamiltonian_flow,
)
from kvhsim.grid import PhaseGrid, ScalarField, l2_norm
from kvhsim.hamiltonian import DomainExitError, polynomial_hamiltonian, scenario_hamiltonian
from kvhsim.kvh import gaussian_wavepacket


@pytest.fixture
def grid():
    return PhaseGrid(-8, 8, -8, 8, 64, 64)


@pytest.fixture
def psi(grid):
    return gaussian_wavepacket(
        grid, center=(0.5, 0.3), sigma=(0.7, 0.7), phase=lambda q, p: 0.3 * q - 0.2 * p
    )


@pytest.fixture
def quarter_turn(grid):
    return lift_hamiltonian_flow(
        scenario_hamiltonian("harmonic"), np.pi / 2, 0.0, grid, on_exit="zero"
    )


class TestLift:
    def test_connection_membership(self, quarter_turn):
        assert quarter_turn.connection_residual() < 1e-4

    def test_flow_is_unimodular(self, quarter_turn):
        det = quarter_turn.jacobian_field().values
        assert np.max(np.abs(det - 1.0)) < 1e-4

    def test_inverse_composes_to_identity(self, quarter_turn, grid):
        q, p = quarter_turn.eta(grid.Q, grid.P)
        q0, p0 = quarter_turn.inverse().eta(q, p)
        assert np.max(np.abs(q0 - grid.Q)) < 1e-8
        assert np.max(np.abs(p0 - grid.P)) < 1e-8

    def test_domain_exit_policy(self):
        g = PhaseGrid(-1, 1, -1, 1, 16, 16)
        with pytest.raises(DomainExitError):
            lift_hamiltonian_flow(scenario_hamiltonian("free"), 3.0, 0.0, g)
        lift_hamiltonian_flow(scenario_hamiltonian("free"), 3.0, 0.0, g, on_exit="zero")


class TestVanHoveAction:
    def test_unitary_on_interior_support(self, quarter_turn, psi):
        upsi = apply_van_hove(quarter_turn, psi, on_exit="zero")
        assert upsi.norm() == pytest.approx(1.0, abs=1e-5)

    def test_inverse_action_roundtrip(self, quarter_turn, psi, grid):
        upsi = apply_van_hove(quarter_turn, psi, on_exit="zero")
        back = apply_van_hove(quarter_turn.inverse(), upsi, on_exit="zero")
        err = l2_norm(ScalarField(grid, back.field.values - psi.field.values))
        assert err < 1e-4

    def test_theta_offset_is_global_phase(self, grid, psi):
        G = scenario_hamiltonian("harmonic")
        T0 = lift_hamiltonian_flow(G, 0.3, 0.0, grid, on_exit="zero")
        T1 = lift_hamiltonian_flow(G, 0.3, 0.7, grid, on_exit="zero")
        a = apply_van_hove(T0, psi, on_exit="zero").field.values
        b = apply_van_hove(T1, psi, on_exit="zero").field.values
        np.testing.assert_allclose(b, np.exp(-0.7j / psi.hbar) * a, atol=1e-12)


class TestEquivariance:
    def test_closed_form_composition(self, quarter_turn, psi):
        # quarter rotation maps q^2/2 to p^2/2
        H = polynomial_hamiltonian("half_q2", {(2, 0): 0.5})
        H_rot = polynomial_hamiltonian("half_p2", {(0, 2): 0.5})
        r = equivariance_residual(quarter_turn, H, psi, composed=H_rot, on_exit="zero")
        assert r < 1e-5

    def test_numeric_composition_path(self, grid, psi):
        G = scenario_hamiltonian("harmonic")
        T = lift_hamiltonian_flow(G, 0.4, 0.0, grid, on_exit="zero")
        H = polynomial_hamiltonian("half_q2", {(2, 0): 0.5})
        r = equivariance_residual(T, H, psi, on_exit="zero")
        assert r < 1e-3
