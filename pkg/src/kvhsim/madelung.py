"""Hydrodynamic (Madelung) layer on phase space.

Polar decomposition of wavefunctions, the momentum-map expressions for
the classical density, and the two equivalent evolution systems: polar
variables (S, D) and hydrodynamic variables (sigma, D).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .grid import (
    PhaseGrid,
    ScalarField,
    divergence,
    integrate,
    poisson_bracket,
    time_steps,
)
from .hamiltonian import (
    HamiltonianSpec,
    OneForm,
    canonical_one_form,
    jmap,
    self_broadcast,
)
from .kvh import WaveFunction


@dataclass
class HydroState:
    """Momentum one-form and density: (sigma, D)."""

    sigma: OneForm
    D: ScalarField

    @property
    def grid(self) -> PhaseGrid:
        return self.D.grid


@dataclass
class PolarPair:
    """Phase S (units of action) and density D.

    mask is None for globally defined smooth S; otherwise it marks where
    the phase could be unwrapped (density above the polar threshold).
    """

    S: ScalarField
    D: ScalarField
    mask: np.ndarray | None = None
    n_components: int = 1
    component_offsets: tuple = ()


def hydro_from_wavefunction(psi: WaveFunction) -> HydroState:
    """sigma = hbar Im(conj(Ψ) grad Ψ), D = |Ψ|²."""
    g = psi.grid
    v = psi.field.values
    conj_v = np.conj(v)
    sigma_q = psi.hbar * np.imag(conj_v * g.ddq(v))
    sigma_p = psi.hbar * np.imag(conj_v * g.ddp(v))
    D = np.abs(v) ** 2
    return HydroState(
        OneForm(ScalarField(g, sigma_q), ScalarField(g, sigma_p)),
        ScalarField(g, D),
    )


def _neighbors(iq, ip, n_q, n_p):
    yield (iq - 1) % n_q, ip
    yield (iq + 1) % n_q, ip
    yield iq, (ip - 1) % n_p
    yield iq, (ip + 1) % n_p


def polar_decompose(psi: WaveFunction, eps_polar: float | None = None) -> PolarPair:
    """Polar form Ψ = sqrt(D) exp(iS/ħ) with flood-fill phase unwrapping.

    Unwrapping starts from the density maximum and proceeds by breadth
    first search over nodes with D > eps_polar; each disconnected support
    component gets its own (reported) phase offset. S is zero off-support.
    """
    g = psi.grid
    v = psi.field.values
    D = np.abs(v) ** 2
    if eps_polar is None:
        eps_polar = 1e-8 * D.max()
    mask = D > eps_polar
    theta = np.zeros_like(D)
    angle = np.angle(v)
    visited = np.zeros_like(mask)
    offsets = []
    remaining = mask.copy()
    while remaining.any():
        start = np.unravel_index(np.argmax(np.where(remaining, D, -np.inf)), D.shape)
        offsets.append(float(angle[start]))
        theta[start] = angle[start]
        visited[start] = True
        remaining[start] = False
        queue = deque([start])
        while queue:
            iq, ip = queue.popleft()
            for jq, jp in _neighbors(iq, ip, g.n_q, g.n_p):
                if mask[jq, jp] and not visited[jq, jp]:
                    jump = angle[jq, jp] - angle[iq, ip]
                    jump = (jump + np.pi) % (2 * np.pi) - np.pi
                    theta[jq, jp] = theta[iq, ip] + jump
                    visited[jq, jp] = True
                    remaining[jq, jp] = False
                    queue.append((jq, jp))
    S = psi.hbar * theta
    S[~mask] = 0.0
    return PolarPair(
        S=ScalarField(g, S),
        D=ScalarField(g, D),
        mask=None if mask.all() else mask,
        n_components=len(offsets),
        component_offsets=tuple(offsets),
    )


def reconstruct_wavefunction(pair: PolarPair, hbar: float = 1.0) -> WaveFunction:
    values = np.sqrt(np.maximum(pair.D.values, 0.0)) * np.exp(
        1j * pair.S.values / hbar
    )
    return WaveFunction(ScalarField(pair.S.grid, values), hbar)


def classical_density(psi: WaveFunction) -> ScalarField:
    """Momentum map to densities: |Ψ|² - div(JA |Ψ|²) + iħ{Ψ, conj Ψ}.

    In canonical coordinates JA = (0, -p), so the middle term is
    +d/dp(p |Ψ|²). The result is real up to round-off.
    """
    g = psi.grid
    abssq = np.abs(psi.field.values) ** 2
    A = canonical_one_form(g)
    ja_q, ja_p = jmap(A)
    div_term = divergence(
        ScalarField(g, ja_q.values * abssq), ScalarField(g, ja_p.values * abssq)
    )
    bracket = poisson_bracket(psi.field, psi.field.conj())
    rho = abssq - div_term.values + 1j * psi.hbar * bracket.values
    return ScalarField(g, np.real(rho))


def classical_density_from_hydro(h: HydroState) -> ScalarField:
    """Alternative density representation: D + div(J sigma - J A D)."""
    g = h.grid
    js_q, js_p = jmap(h.sigma)
    A = canonical_one_form(g)
    ja_q, ja_p = jmap(A)
    v_q = ScalarField(g, js_q.values - ja_q.values * h.D.values)
    v_p = ScalarField(g, js_p.values - ja_p.values * h.D.values)
    return ScalarField(g, h.D.values + divergence(v_q, v_p).values)


class MaskedPhaseError(ValueError):
    """Operation requires a globally defined smooth phase."""


def madelung_rhs(pair: PolarPair, H: HamiltonianSpec):
    """Polar-variable transport: dS/dt = L_H - {S,H}, dD/dt = -{D,H}."""
    if pair.mask is not None:
        raise MaskedPhaseError("masked polar decomposition not accepted; supply smooth S")
    g = pair.S.grid
    a = self_broadcast(H.h_q(g.Q, g.P), g)
    b = self_broadcast(H.h_p(g.Q, g.P), g)
    lh = self_broadcast(H.lagrangian(g.Q, g.P), g)
    # {f,H} with closed-form H partials: dq(f) b - dp(f) a
    bracket_S = g.ddq(pair.S.values) * b - g.ddp(pair.S.values) * a
    bracket_D = g.ddq(pair.D.values) * b - g.ddp(pair.D.values) * a
    return ScalarField(g, lh - bracket_S), ScalarField(g, -bracket_D)


def evolve_polar(pair: PolarPair, H: HamiltonianSpec, t_final: float, dt: float, stride: int = 0):
    """RK4 evolution of the polar system; returns (times, snapshots)."""
    g = pair.S.grid
    S = pair.S.values.astype(float).copy()
    D = pair.D.values.astype(float).copy()

    def rhs(S, D):
        dS, dD = madelung_rhs(
            PolarPair(ScalarField(g, S), ScalarField(g, D)), H
        )
        return dS.values, dD.values

    n_steps, dt = time_steps(t_final, dt)
    times = [0.0]
    snaps = [PolarPair(ScalarField(g, S.copy()), ScalarField(g, D.copy()))]
    for step in range(1, n_steps + 1):
        k1 = rhs(S, D)
        k2 = rhs(S + 0.5 * dt * k1[0], D + 0.5 * dt * k1[1])
        k3 = rhs(S + 0.5 * dt * k2[0], D + 0.5 * dt * k2[1])
        k4 = rhs(S + dt * k3[0], D + dt * k3[1])
        S = S + (dt / 6) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        D = D + (dt / 6) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if (stride and step % stride == 0) or step == n_steps:
            times.append(step * dt)
            snaps.append(PolarPair(ScalarField(g, S.copy()), ScalarField(g, D.copy())))
    return times, snaps


def _require_second_partials(H: HamiltonianSpec) -> None:
    if H.h_qq is None or H.h_qp is None or H.h_pp is None:
        raise ValueError(f"{H.name}: second partials required for Lie-derivative transport")


def _lie_derivative_one_form(tau_q, tau_p, H: HamiltonianSpec, g: PhaseGrid):
    """Coordinate formula (£_X tau)_i = X·grad(tau_i) + tau_j d_i X^j for X = X_H."""
    _require_second_partials(H)
    Xq = self_broadcast(H.h_p(g.Q, g.P), g)
    Xp = self_broadcast(-H.h_q(g.Q, g.P), g)
    h_qq = self_broadcast(H.h_qq(g.Q, g.P), g)
    h_qp = self_broadcast(H.h_qp(g.Q, g.P), g)
    h_pp = self_broadcast(H.h_pp(g.Q, g.P), g)
    lie_q = (
        Xq * g.ddq(tau_q)
        + Xp * g.ddp(tau_q)
        + tau_q * h_qp
        + tau_p * (-h_qq)
    )
    lie_p = (
        Xq * g.ddq(tau_p)
        + Xp * g.ddp(tau_p)
        + tau_q * h_pp
        + tau_p * (-h_qp)
    )
    return lie_q, lie_p


def one_form_transport_residual(snapshots, times, H: HamiltonianSpec):
    """Residual time-series of (d/dt + £_{X_H})(dS - A) = 0.

    The time derivative is a centered difference between neighboring
    snapshots, so residuals are reported at interior snapshot times.
    """
    if len(snapshots) < 3:
        raise ValueError("need at least three snapshots for a centered time derivative")
    g = snapshots[0].S.grid
    taus = []
    for pair in snapshots:
        if pair.mask is not None:
            raise MaskedPhaseError("transport residual requires smooth unmasked S")
        tau_q = g.ddq(pair.S.values) - g.P
        tau_p = g.ddp(pair.S.values)
        taus.append((tau_q, tau_p))
    out = []
    for k in range(1, len(snapshots) - 1):
        dt_c = times[k + 1] - times[k - 1]
        dtau_q = (taus[k + 1][0] - taus[k - 1][0]) / dt_c
        dtau_p = (taus[k + 1][1] - taus[k - 1][1]) / dt_c
        lie_q, lie_p = _lie_derivative_one_form(taus[k][0], taus[k][1], H, g)
        res = np.sqrt(
            ((dtau_q + lie_q) ** 2 + (dtau_p + lie_p) ** 2).sum() * g.dq * g.dp
        )
        out.append(float(res))
    return out


def hydro_rhs(h: HydroState, H: HamiltonianSpec) -> HydroState:
    """Lie-Poisson evolution: transport of tau = sigma - D A, continuity for D.

    Returns the time derivative assembled back in (sigma, D) variables.
    """
    g = h.grid
    _require_second_partials(H)
    tau_q = h.sigma.a_q.values - h.D.values * g.P
    tau_p = h.sigma.a_p.values.copy()
    lie_q, lie_p = _lie_derivative_one_form(tau_q, tau_p, H, g)
    Xq = self_broadcast(H.h_p(g.Q, g.P), g)
    Xp = self_broadcast(-H.h_q(g.Q, g.P), g)
    dD = -(g.ddq(h.D.values * Xq) + g.ddp(h.D.values * Xp))
    dsigma_q = -lie_q + dD * g.P
    dsigma_p = -lie_p
    return HydroState(
        OneForm(ScalarField(g, dsigma_q), ScalarField(g, dsigma_p)),
        ScalarField(g, dD),
    )


def evolve_hydro(h0: HydroState, H: HamiltonianSpec, t_final: float, dt: float) -> HydroState:
    """RK4 time stepping of hydro_rhs."""
    g = h0.grid
    state = (
        h0.sigma.a_q.values.astype(float).copy(),
        h0.sigma.a_p.values.astype(float).copy(),
        h0.D.values.astype(float).copy(),
    )

    def pack(sq, sp, D):
        return HydroState(
            OneForm(ScalarField(g, sq), ScalarField(g, sp)), ScalarField(g, D)
        )

    def rhs(sq, sp, D):
        d = hydro_rhs(pack(sq, sp, D), H)
        return d.sigma.a_q.values, d.sigma.a_p.values, d.D.values

    n_steps, dt = time_steps(t_final, dt)
    for _ in range(n_steps):
        k1 = rhs(*state)
        k2 = rhs(*(s + 0.5 * dt * k for s, k in zip(state, k1)))
        k3 = rhs(*(s + 0.5 * dt * k for s, k in zip(state, k2)))
        k4 = rhs(*(s + dt * k for s, k in zip(state, k3)))
        state = tuple(
            s + (dt / 6) * (a + 2 * b + 2 * c + d)
            for s, a, b, c, d in zip(state, k1, k2, k3, k4)
        )
    return pack(*state)


def hydro_energy(h: HydroState, H: HamiltonianSpec) -> float:
    """h(sigma, D) = integral of (X_H · sigma - D L_H)."""
    g = h.grid
    Xq = self_broadcast(H.h_p(g.Q, g.P), g)
    Xp = self_broadcast(-H.h_q(g.Q, g.P), g)
    lh = self_broadcast(H.lagrangian(g.Q, g.P), g)
    integrand = Xq * h.sigma.a_q.values + Xp * h.sigma.a_p.values - h.D.values * lh
    return float(np.real(g.integrate_values(integrand)))
