"""Koopman wavefunctions, the prequantum operator and unitary evolution.

The covariant Liouvillian acting on a wavefunction is
    iħ {H, Ψ} - L_H Ψ,  L_H = p dH/dp - H,
with the bracket term built from closed-form Hamiltonian partials and
grid derivatives of Ψ. Time stepping is explicit (RK4 by default) on the
full complex field; unitarity is monitored, not enforced.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.ndimage import map_coordinates

from .grid import (
    GridMismatchError,
    PhaseGrid,
    ScalarField,
    integrate,
    l2_norm,
    time_steps,
)
from .hamiltonian import (
    DomainExitError,
    HamiltonianSpec,
    PolynomialHamiltonian,
    flow_with_action,
    out_of_domain_mask,
    self_broadcast,
)

SCHEMES = ("rk4", "midpoint")


class EvolutionAborted(RuntimeError):
    """NaN detected during time stepping; carries the last good snapshot."""

    def __init__(self, message, t, last_good):
        super().__init__(message)
        self.t = t
        self.last_good = last_good


@dataclass
class WaveFunction:
    """Koopman wavefunction: complex field on phase space with a scale ħ."""

    field: ScalarField
    hbar: float = 1.0
    diagnostics: list = None

    def __post_init__(self):
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        if self.field.values.dtype.kind != "c":
            self.field = ScalarField(self.field.grid, self.field.values.astype(complex))
        if self.diagnostics is None:
            self.diagnostics = []

    @property
    def grid(self) -> PhaseGrid:
        return self.field.grid

    def norm(self) -> float:
        return l2_norm(self.field)

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.field.copy(), self.hbar, list(self.diagnostics))


def gaussian_wavepacket(
    grid: PhaseGrid,
    center=(0.0, 0.0),
    sigma=(1.0, 1.0),
    phase: Callable | None = None,
    hbar: float = 1.0,
) -> WaveFunction:
    """Normalized Gaussian on phase space, optionally with phase exp(iS/ħ).

    `phase` is a callable S(q, p) in units of action.
    """
    q0, p0 = center
    sq, sp = sigma
    env = np.exp(-((grid.Q - q0) ** 2) / (4 * sq**2) - ((grid.P - p0) ** 2) / (4 * sp**2))
    values = env.astype(complex)
    if phase is not None:
        values = values * np.exp(1j * phase(grid.Q, grid.P) / hbar)
    psi = WaveFunction(ScalarField(grid, values), hbar)
    psi.field.values /= psi.norm()
    return psi


def _check_compatible(a: WaveFunction, b: WaveFunction) -> None:
    if not a.grid.same_geometry(b.grid):
        raise GridMismatchError("wavefunctions live on different grids")
    if a.hbar != b.hbar:
        raise GridMismatchError("wavefunctions carry different hbar")


def hermitian_inner(psi1: WaveFunction, psi2: WaveFunction) -> complex:
    """<psi1|psi2> = integral of conj(psi1) psi2 dz."""
    _check_compatible(psi1, psi2)
    return complex(integrate(psi1.field.conj() * psi2.field))


def symplectic_form(psi1: WaveFunction, psi2: WaveFunction) -> float:
    """Omega(psi1, psi2) = 2 hbar Im <psi1|psi2>."""
    return 2.0 * psi1.hbar * hermitian_inner(psi1, psi2).imag


def boundary_margin_fraction(psi: WaveFunction, threshold: float = 1e-10) -> float:
    """Smallest distance (as a fraction of domain width) from significant
    support to the box boundary, per side minimum."""
    g = psi.grid
    mass = np.abs(psi.field.values) ** 2
    significant = mass > threshold * mass.max()
    if not significant.any():
        return 0.5
    iq, ip = np.where(significant)
    frac_q = min(iq.min(), g.n_q - 1 - iq.max()) / g.n_q
    frac_p = min(ip.min(), g.n_p - 1 - ip.max()) / g.n_p
    return float(min(frac_q, frac_p))


def _precompute(H: HamiltonianSpec, grid: PhaseGrid):
    a = self_broadcast(H.h_q(grid.Q, grid.P), grid)
    b = self_broadcast(H.h_p(grid.Q, grid.P), grid)
    lh = self_broadcast(H.lagrangian(grid.Q, grid.P), grid)
    return a, b, lh


def apply_prequantum(H: HamiltonianSpec, psi: WaveFunction, margin: float = 0.1) -> WaveFunction:
    """Covariant Liouvillian: iħ {H, Ψ} - L_H Ψ."""
    grid = psi.grid
    a, b, lh = _precompute(H, grid)
    dpsi_q = grid.ddq(psi.field.values)
    dpsi_p = grid.ddp(psi.field.values)
    values = 1j * psi.hbar * (a * dpsi_p - b * dpsi_q) - lh * psi.field.values
    out = WaveFunction(ScalarField(grid, values), psi.hbar)
    if boundary_margin_fraction(psi) < margin:
        out.diagnostics.append("support within boundary margin")
    return out


def kvh_rhs(H: HamiltonianSpec, psi: WaveFunction) -> WaveFunction:
    """Right-hand side of the wavefunction transport: {H,Ψ} + (i/ħ) L_H Ψ."""
    lhpsi = apply_prequantum(H, psi)
    out = WaveFunction(
        ScalarField(psi.grid, (-1j / psi.hbar) * lhpsi.field.values), psi.hbar
    )
    out.diagnostics = lhpsi.diagnostics
    return out


@dataclass
class Trajectory:
    """Snapshots of an evolution, plus per-snapshot conserved quantities."""

    times: list
    snapshots: list
    norms: list = field(default_factory=list)
    energies: list = field(default_factory=list)

    def final(self):
        return self.snapshots[-1]


def cfl_number(H: HamiltonianSpec, grid: PhaseGrid, dt: float) -> float:
    a, b, _ = _precompute(H, grid)
    speed = np.max(np.abs(b)) / grid.dq + np.max(np.abs(a)) / grid.dp
    return dt * speed


def evolve(
    H: HamiltonianSpec,
    psi0: WaveFunction,
    t_final: float,
    dt: float,
    scheme: str = "rk4",
    stride: int = 0,
    record_energy: bool = True,
) -> Trajectory:
    """Time-step the wavefunction transport equation.

    stride: snapshot every `stride` steps (0 keeps only start and end).
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    grid = psi0.grid
    hbar = psi0.hbar
    a, b, lh = _precompute(H, grid)
    phase_rate = (1j / hbar) * lh

    def rhs(values):
        return (
            a * grid.ddp(values)
            - b * grid.ddq(values)
            + phase_rate * values
        )

    if cfl_number(H, grid, dt) > 0.5:
        warnings.warn(
            f"advisory CFL number {cfl_number(H, grid, dt):.2f} exceeds 0.5",
            RuntimeWarning,
        )

    n_steps, dt = time_steps(t_final, dt)
    values = psi0.field.values.astype(complex).copy()

    def snap(t, v):
        psi = WaveFunction(ScalarField(grid, v.copy()), hbar)
        traj.times.append(t)
        traj.snapshots.append(psi)
        traj.norms.append(psi.norm())
        if record_energy:
            traj.energies.append(kvh_energy(H, psi))

    traj = Trajectory(times=[], snapshots=[])
    snap(0.0, values)
    for step in range(1, n_steps + 1):
        if scheme == "rk4":
            k1 = rhs(values)
            k2 = rhs(values + 0.5 * dt * k1)
            k3 = rhs(values + 0.5 * dt * k2)
            k4 = rhs(values + dt * k3)
            values = values + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        else:  # explicit midpoint
            k1 = rhs(values)
            values = values + dt * rhs(values + 0.5 * dt * k1)
        if not np.all(np.isfinite(values)):
            raise EvolutionAborted(
                f"NaN detected at step {step}", (step - 1) * dt, traj.final()
            )
        if stride and step % stride == 0 and step != n_steps:
            snap(step * dt, values)
    if n_steps > 0:
        snap(n_steps * dt, values)
    return traj


def interpolate_field(f: ScalarField, q, p, order: int = 3) -> np.ndarray:
    """Bicubic spline interpolation with periodic wrapping."""
    g = f.grid
    coords = np.array([(q - g.q_min) / g.dq, (p - g.p_min) / g.dp])
    if f.values.dtype.kind == "c":
        re = map_coordinates(f.values.real, coords, order=order, mode="grid-wrap")
        im = map_coordinates(f.values.imag, coords, order=order, mode="grid-wrap")
        return re + 1j * im
    return map_coordinates(f.values, coords, order=order, mode="grid-wrap")


def characteristics_oracle(
    H: HamiltonianSpec, psi0: WaveFunction, t: float, dt: float = 1e-3,
    on_exit: str = "error",
) -> WaveFunction:
    """Exact KvH solution by the method of characteristics.

    Each node is flowed backwards; the wavefunction value is interpolated
    there (bicubic) and multiplied by the accumulated-action phase.

    on_exit: "error" rejects characteristics leaving the box; "zero"
    assigns zero there (valid for boundary-clear initial data).
    """
    grid = psi0.grid
    if t == 0:
        return psi0.copy()
    q0, p0, action_back = flow_with_action(H, -t, grid.Q, grid.P, dt)
    bad = out_of_domain_mask(grid, q0, p0)
    if bad.any():
        if on_exit != "zero":
            idx = tuple(int(i) for i in np.argwhere(bad)[0])
            raise DomainExitError(
                f"characteristic from node {idx} left the domain",
                indices=np.argwhere(bad),
            )
        q0 = np.where(bad, grid.q_min, q0)
        p0 = np.where(bad, grid.p_min, p0)
        action_back = np.where(bad, 0.0, action_back)
    values = np.exp(-1j * action_back / psi0.hbar) * interpolate_field(
        psi0.field, q0, p0
    )
    if bad.any():
        values = np.where(bad, 0.0, values)
    return WaveFunction(ScalarField(grid, values), psi0.hbar)


def kvh_energy(H: HamiltonianSpec, psi: WaveFunction) -> float:
    """h(Ψ) = <Ψ| L̂_H Ψ>; real up to Hermiticity round-off."""
    return hermitian_inner(psi, apply_prequantum(H, psi)).real


def commutator_residual(
    H: HamiltonianSpec,
    F: HamiltonianSpec,
    psi: WaveFunction,
    bracket: HamiltonianSpec | None = None,
) -> float:
    """Relative residual of [L̂_H, L̂_F] = iħ L̂_{H,F} on psi.

    `bracket` is the closed-form Poisson bracket {H,F}; it is derived
    automatically when both Hamiltonians are polynomial.
    """
    if bracket is None:
        if isinstance(H, PolynomialHamiltonian) and isinstance(F, PolynomialHamiltonian):
            bracket = H.poisson_with(F)
        else:
            raise ValueError("closed-form {H,F} required for non-polynomial inputs")
    hf = apply_prequantum(H, apply_prequantum(F, psi))
    fh = apply_prequantum(F, apply_prequantum(H, psi))
    hb = apply_prequantum(bracket, psi)
    resid = (
        hf.field.values
        - fh.field.values
        - 1j * psi.hbar * hb.field.values
    )
    return l2_norm(ScalarField(psi.grid, resid)) / psi.norm()
