"""Strict contact transformations and their unitary action on wavefunctions.

Only lifts of Hamiltonian flows are constructed: the time-t flow of X_G
paired with the phase accumulated from -L_G along the trajectories. Such
pairs preserve the connection one-form, and their unitary action reduces
to composition with the inverse flow times a phase (the flow has unit
Jacobian, so no density factor appears).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import PhaseGrid, ScalarField, l2_norm
from .hamiltonian import (
    DomainExitError,
    HamiltonianSpec,
    flow_jacobian,
    flow_with_action,
    out_of_domain_mask,
)
from .kvh import WaveFunction, apply_prequantum, interpolate_field


@dataclass
class ContactTransform:
    """Lift of a Hamiltonian flow to the prequantum bundle.

    generator: the Hamiltonian G whose flow is lifted.
    time: flow time.
    theta: constant phase offset (the lift is unique only up to it).
    flow_dt: step used when integrating trajectories.
    """

    generator: HamiltonianSpec
    time: float
    theta: float
    grid: PhaseGrid
    flow_dt: float = 1e-3

    def eta(self, q, p):
        """Forward flow map."""
        qf, pf, _ = flow_with_action(self.generator, self.time, q, p, self.flow_dt)
        return qf, pf

    def eta_inv(self, q, p):
        """Inverse map, computed as the reversed-time flow."""
        qb, pb, _ = flow_with_action(self.generator, -self.time, q, p, self.flow_dt)
        return qb, pb

    def phase_field(self) -> ScalarField:
        """phi on the grid: theta minus the forward action integral."""
        _, _, action = flow_with_action(
            self.generator, self.time, self.grid.Q, self.grid.P, self.flow_dt
        )
        return ScalarField(self.grid, self.theta - action)

    def jacobian_field(self) -> ScalarField:
        """Numerical Jacobian determinant of eta (should be 1)."""
        det = flow_jacobian(
            self.generator, self.time, self.grid.Q, self.grid.P, self.flow_dt
        )
        return ScalarField(self.grid, det)

    def inverse(self) -> "ContactTransform":
        return ContactTransform(
            self.generator, -self.time, -self.theta, self.grid, self.flow_dt
        )

    def connection_residual(self) -> float:
        """L2 residual of the membership condition eta*A + dphi = A."""
        g = self.grid
        step = 1e-5
        # pullback (eta*A)_i = p(eta(z)) * d eta_q / d z_i
        qc, pc = self.eta(g.Q, g.P)
        qq, _ = self.eta(g.Q + step, g.P)
        qm, _ = self.eta(g.Q - step, g.P)
        qp_, _ = self.eta(g.Q, g.P + step)
        qpm, _ = self.eta(g.Q, g.P - step)
        pull_q = pc * (qq - qm) / (2 * step)
        pull_p = pc * (qp_ - qpm) / (2 * step)
        # dphi by the same off-grid finite differences of the action
        def phi(q, p):
            _, _, action = flow_with_action(self.generator, self.time, q, p, self.flow_dt)
            return self.theta - action

        dphi_q = (phi(g.Q + step, g.P) - phi(g.Q - step, g.P)) / (2 * step)
        dphi_p = (phi(g.Q, g.P + step) - phi(g.Q, g.P - step)) / (2 * step)
        res_q = pull_q + dphi_q - g.P
        res_p = pull_p + dphi_p
        return float(
            np.sqrt(
                np.real(
                    (np.abs(res_q) ** 2 + np.abs(res_p) ** 2).sum() * g.dq * g.dp
                )
            )
        )


def lift_hamiltonian_flow(
    G: HamiltonianSpec,
    t: float,
    theta: float,
    grid: PhaseGrid,
    flow_dt: float = 1e-3,
    on_exit: str = "error",
) -> ContactTransform:
    """Lift the time-t flow of X_G to a strict contact transformation."""
    T = ContactTransform(G, t, theta, grid, flow_dt)
    if on_exit == "error":
        # fail early if trajectories from grid nodes escape the box
        qf, pf = T.eta(grid.Q, grid.P)
        bad = out_of_domain_mask(grid, qf, pf)
        if bad.any():
            idx = tuple(int(i) for i in np.argwhere(bad)[0])
            raise DomainExitError(f"flow from node {idx} left the domain")
    return T


def apply_van_hove(
    T: ContactTransform, psi: WaveFunction, on_exit: str = "error"
) -> WaveFunction:
    """Unitary action: U Ψ(z) = exp(-i phi(η⁻¹ z)/ħ) Ψ(η⁻¹ z).

    phi evaluated at η⁻¹(z) equals theta plus the action accumulated on
    the backward trajectory, so a single backward integration per node
    provides both pieces. on_exit as in the characteristics oracle.
    """
    grid = psi.grid
    q0, p0, action_back = flow_with_action(
        T.generator, -T.time, grid.Q, grid.P, T.flow_dt
    )
    bad = out_of_domain_mask(grid, q0, p0)
    if bad.any():
        if on_exit != "zero":
            idx = tuple(int(i) for i in np.argwhere(bad)[0])
            raise DomainExitError(f"inverse flow from node {idx} left the domain")
        q0 = np.where(bad, grid.q_min, q0)
        p0 = np.where(bad, grid.p_min, p0)
        action_back = np.where(bad, 0.0, action_back)
    values = np.exp(-1j * (T.theta + action_back) / psi.hbar) * interpolate_field(
        psi.field, q0, p0
    )
    if bad.any():
        values = np.where(bad, 0.0, values)
    return WaveFunction(ScalarField(grid, values), psi.hbar)


def _composed_prequantum(
    T: ContactTransform, H: HamiltonianSpec, psi: WaveFunction, step: float = 1e-4
) -> WaveFunction:
    """Apply the prequantum operator of H∘η, built numerically.

    H∘η and its partials are sampled by flowing slightly displaced node
    sets and central-differencing the composed scalar.
    """
    g = psi.grid

    def h_eta(q, p):
        qf, pf = T.eta(q, p)
        return H.h(qf, pf)

    hc = h_eta(g.Q, g.P)
    dh_q = (h_eta(g.Q + step, g.P) - h_eta(g.Q - step, g.P)) / (2 * step)
    dh_p = (h_eta(g.Q, g.P + step) - h_eta(g.Q, g.P - step)) / (2 * step)
    lagrangian = g.P * dh_p - hc
    dpsi_q = g.ddq(psi.field.values)
    dpsi_p = g.ddp(psi.field.values)
    values = (
        1j * psi.hbar * (dh_q * dpsi_p - dh_p * dpsi_q) - lagrangian * psi.field.values
    )
    return WaveFunction(ScalarField(g, values), psi.hbar)


def equivariance_residual(
    T: ContactTransform,
    H: HamiltonianSpec,
    psi: WaveFunction,
    composed: HamiltonianSpec | None = None,
    on_exit: str = "error",
) -> float:
    """Relative residual of U† L̂_H U = L̂_{H∘η} on psi.

    Pass `composed` when H∘η is known in closed form; otherwise it is
    constructed numerically from the flow.
    """
    lhs = apply_van_hove(
        T.inverse(),
        apply_prequantum(H, apply_van_hove(T, psi, on_exit)),
        on_exit,
    )
    if composed is not None:
        rhs = apply_prequantum(composed, psi)
    else:
        rhs = _composed_prequantum(T, H, psi)
    diff = ScalarField(psi.grid, lhs.field.values - rhs.field.values)
    return l2_norm(diff) / psi.norm()
