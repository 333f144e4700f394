"""Von Neumann kernel operators on a coarse phase-space grid.

Operators are dense Hermitian matrices indexed by flattened grid nodes
(row-major, q index major). The integral-kernel normalization is such
that matrix entries are kernel values; traces and inner products carry
the quadrature weight dq*dp.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import PERIODIC, PhaseGrid, ScalarField, time_steps
from .hamiltonian import (
    HamiltonianSpec,
    OneForm,
    flow_with_action,
    out_of_domain_mask,
    self_broadcast,
)
from .kvh import WaveFunction, interpolate_field
from .madelung import HydroState


class KernelError(ValueError):
    pass


@dataclass
class VNKernel:
    """Dense Hermitian integral kernel K(z, z') on a coarse grid."""

    grid: PhaseGrid
    K: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        n = self.grid.n_q * self.grid.n_p
        if self.K.shape != (n, n):
            raise KernelError(f"kernel shape {self.K.shape} does not match grid ({n}x{n})")

    @property
    def weight(self) -> float:
        return self.grid.dq * self.grid.dp

    def trace(self) -> float:
        return float(np.real(np.trace(self.K))) * self.weight

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.K - self.K.conj().T)))

    def casimir(self, n: int = 2) -> float:
        """Tr(Theta^n) with quadrature weights."""
        M = self.K * self.weight
        out = np.eye(M.shape[0], dtype=complex)
        for _ in range(n):
            out = out @ M
        return float(np.real(np.trace(out)))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the operator (weighted kernel matrix), sorted."""
        return np.sort(np.linalg.eigvalsh(self.K * self.weight))

    def copy(self) -> "VNKernel":
        return VNKernel(self.grid, self.K.copy(), self.hbar)


def _flatten(values: np.ndarray) -> np.ndarray:
    return values.reshape(-1)


@lru_cache(maxsize=8)
def _spectral_diff_matrix(n: int, spacing: float) -> np.ndarray:
    k = 2 * np.pi * np.fft.fftfreq(n, d=spacing)
    if n % 2 == 0:
        k[n // 2] = 0.0
    D = np.fft.ifft(1j * k[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)
    return np.real(D)


@lru_cache(maxsize=16)
def _stencil_diff_matrix(n: int, spacing: float, npts: int) -> np.ndarray:
    """First-derivative matrix from npts-point stencils, one-sided at edges.

    npts = 5 reproduces the grid's fd4 stencils exactly; larger stencils
    are used where the truncation error must sit below a tight tolerance
    (kernel hydrodynamic extraction).
    """
    D = np.zeros((n, n))
    for i in range(n):
        lo = min(max(i - npts // 2, 0), n - npts)
        offsets = np.arange(lo, lo + npts) - i
        A = np.vander(offsets, npts, increasing=True).T.astype(float)
        b = np.zeros(npts)
        b[1] = 1.0
        D[i, lo : lo + npts] = np.linalg.solve(A, b) / spacing
    return D


def _diff_matrix(n: int, spacing: float, bc: str, npts: int = 5) -> np.ndarray:
    if bc == PERIODIC:
        return _spectral_diff_matrix(n, spacing)
    return _stencil_diff_matrix(n, spacing, npts)


def derivative_matrices(grid: PhaseGrid, npts: int = 5):
    """(D_q, D_p) acting on flattened fields, honoring the grid's bc mode."""
    d1q = _diff_matrix(grid.n_q, grid.dq, grid.bc, npts)
    d1p = _diff_matrix(grid.n_p, grid.dp, grid.bc, npts)
    Dq = np.kron(d1q, np.eye(grid.n_p))
    Dp = np.kron(np.eye(grid.n_q), d1p)
    return Dq, Dp


def kernel_from_wavefunction(psi: WaveFunction, tol: float = 1e-8) -> VNKernel:
    """Rank-1 kernel Psi(z) conj(Psi(z')); requires a normalized input."""
    norm = psi.norm()
    if abs(norm - 1.0) > tol:
        raise KernelError(f"wavefunction norm {norm:.6g} is not 1")
    v = _flatten(psi.field.values)
    return VNKernel(psi.grid, np.outer(v, v.conj()), psi.hbar)


def prequantum_matrix(H: HamiltonianSpec, grid: PhaseGrid, hbar: float = 1.0) -> np.ndarray:
    """Dense discretization of iħ{H, ·} - L_H on flattened fields."""
    Dq, Dp = derivative_matrices(grid)
    a = _flatten(self_broadcast(H.h_q(grid.Q, grid.P), grid))
    b = _flatten(self_broadcast(H.h_p(grid.Q, grid.P), grid))
    lh = _flatten(self_broadcast(H.lagrangian(grid.Q, grid.P), grid))
    return 1j * hbar * (a[:, None] * Dp - b[:, None] * Dq) - np.diag(lh)


def kernel_propagator(
    H: HamiltonianSpec, grid: PhaseGrid, t: float, hbar: float, dt: float = 1e-3
) -> np.ndarray:
    """Unitary propagator matrix on flattened fields, built from characteristics.

    Row i holds the bicubic interpolation weights at the backward-flowed
    node i, times the accumulated-action phase. Nodes whose backward
    characteristic leaves the box get zero rows, which is only valid for
    kernels supported away from the outflow region at the chosen horizon.
    """
    q0, p0, aback = flow_with_action(H, -t, grid.Q, grid.P, dt)
    bad = out_of_domain_mask(grid, q0, p0)
    if bad.any():
        q0 = np.where(bad, grid.q_min, q0)
        p0 = np.where(bad, grid.p_min, p0)
        aback = np.where(bad, 0.0, aback)
    phase = np.exp(-1j * aback / hbar)
    n = grid.n_q * grid.n_p
    U = np.empty((n, n), dtype=complex)
    basis = np.zeros((grid.n_q, grid.n_p))
    flat = basis.reshape(-1)
    for j in range(n):
        flat[j] = 1.0
        col = interpolate_field(ScalarField(grid, basis), q0, p0)
        U[:, j] = (phase * col).reshape(-1)
        flat[j] = 0.0
    if bad.any():
        U[bad.reshape(-1), :] = 0.0
    return U


def evolve_kernel(
    theta0: VNKernel,
    H: HamiltonianSpec,
    t_final: float,
    dt: float,
    method: str = "rk4",
) -> VNKernel:
    """Evolve the kernel under iħ dTheta/dt = [L̂_H, Theta].

    method "rk4" time-steps the dense commutator flow; method
    "characteristics" conjugates by the backward-flow propagator in one
    shot (dt then controls the flow integration only). The latter is the
    accurate choice when the kernel carries mass at the box boundary,
    where one-sided transport stencils break down.
    """
    if method == "characteristics":
        U = kernel_propagator(H, theta0.grid, t_final, theta0.hbar, dt)
        return VNKernel(theta0.grid, U @ theta0.K @ U.conj().T, theta0.hbar)
    if method != "rk4":
        raise ValueError(f"unknown kernel evolution method {method!r}")
    L = prequantum_matrix(H, theta0.grid, theta0.hbar)
    coeff = -1j / theta0.hbar

    def rhs(K):
        return coeff * (L @ K - K @ L)

    K = theta0.K.astype(complex).copy()
    n_steps, dt = time_steps(t_final, dt)
    for step in range(n_steps):
        k1 = rhs(K)
        k2 = rhs(K + 0.5 * dt * k1)
        k3 = rhs(K + 0.5 * dt * k2)
        k4 = rhs(K + dt * k3)
        K = K + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(K)):
            raise RuntimeError(f"NaN in kernel evolution at step {step + 1}")
    return VNKernel(theta0.grid, K, theta0.hbar)


def kernel_energy(theta: VNKernel, H: HamiltonianSpec) -> float:
    """h(Theta) = Tr(L̂_H Theta)."""
    L = prequantum_matrix(H, theta.grid, theta.hbar)
    return float(np.real(np.trace(L @ theta.K))) * theta.weight


def hydro_from_kernel(theta: VNKernel) -> HydroState:
    """Extract (sigma, D) from the kernel.

    D is the kernel diagonal; sigma comes from antisymmetrized slot
    derivatives evaluated at coincidence.
    """
    g = theta.grid
    # wide stencils: the kernel's phase factor is a chirp and the defect
    # tolerances sit well below plain 4th-order truncation at coarse n
    Dq, Dp = derivative_matrices(g, npts=9)
    K = theta.K
    # diag(K @ Dq.T) and diag(Dq @ K) without forming the products
    d2_q = np.einsum("ij,ij->i", K, Dq)   # derivative in the second slot
    d1_q = np.einsum("ij,ji->i", Dq, K)   # derivative in the first slot
    d2_p = np.einsum("ij,ij->i", K, Dp)
    d1_p = np.einsum("ij,ji->i", Dp, K)
    sigma_q = (1j * theta.hbar / 2) * (d2_q - d1_q)
    sigma_p = (1j * theta.hbar / 2) * (d2_p - d1_p)
    D = np.real(np.diag(K))
    shape = (g.n_q, g.n_p)
    return HydroState(
        OneForm(
            ScalarField(g, np.real(sigma_q).reshape(shape)),
            ScalarField(g, np.real(sigma_p).reshape(shape)),
        ),
        ScalarField(g, D.reshape(shape)),
    )


@lru_cache(maxsize=8)
def _half_shift_matrix(n: int, npts: int = 8) -> np.ndarray:
    """Interpolation matrix evaluating a sampled line at i + 1/2, npts-point local stencils."""
    S = np.zeros((n, n))
    for i in range(n):
        lo = min(max(i - npts // 2 + 1, 0), n - npts)
        offsets = np.arange(lo, lo + npts) - i - 0.5
        A = np.vander(offsets, npts, increasing=True).T.astype(float)
        b = np.zeros(npts)
        b[0] = 1.0
        S[i, lo : lo + npts] = np.linalg.solve(A, b)
    return S


def _upsample2(values: np.ndarray) -> np.ndarray:
    """Refine a field to the half-spacing grid by local polynomial interpolation.

    Deliberately not Fourier-based: midpoint evaluation must not pick up
    periodization ringing from non-periodic (boundary-tailed) densities.
    """
    nq, np_ = values.shape
    Sq = _half_shift_matrix(nq)
    Sp = _half_shift_matrix(np_)
    half_q = Sq @ values
    fine_q = np.empty((2 * nq, np_))
    fine_q[0::2] = values
    fine_q[1::2] = half_q
    half_p = fine_q @ Sp.T
    fine = np.empty((2 * nq, 2 * np_))
    fine[:, 0::2] = fine_q
    fine[:, 1::2] = half_p
    return fine


def point_particle_kernel(
    D_target: ScalarField, hbar: float = 1.0, tol: float = 1e-8
) -> VNKernel:
    """Kernel D((z+z')/2) exp(i (p+p')(q-q') / 2ħ) realizing rho = D.

    The phase factor is evaluated in closed form at node pairs. Midpoints
    (z+z')/2 all sit on the half-spacing refinement of the grid, so D is
    evaluated there exactly by Fourier zero-pad upsampling (scattered
    interpolation would leak a few-percent error into the extracted
    sigma).
    """
    g = D_target.grid
    if np.min(D_target.values) < -1e-12:
        raise KernelError("target density must be nonnegative")
    total = float(np.real(g.integrate_values(D_target.values)))
    if abs(total - 1.0) > tol:
        raise KernelError(f"target density integrates to {total:.6g}, expected 1")
    fine = _upsample2(D_target.values)
    # midpoint of nodes (iq,ip) and (jq,jp) has fine-grid index (iq+jq, ip+jp)
    iq = np.arange(g.n_q)
    ip = np.arange(g.n_p)
    fq = (iq[:, None] + iq[None, :]).astype(int)
    fp = (ip[:, None] + ip[None, :]).astype(int)
    FQ = np.repeat(np.repeat(fq, g.n_p, axis=0), g.n_p, axis=1)
    FP = np.tile(np.tile(fp, (g.n_q, 1)), (1, g.n_q))
    Dmid = fine[FQ, FP]
    q = _flatten(g.Q)
    p = _flatten(g.P)
    phase = np.exp((1j / (2 * hbar)) * (p[:, None] + p[None, :]) * (q[:, None] - q[None, :]))
    K = Dmid * phase
    # interpolation at coincident points is exact, keep Hermiticity exact too
    K = 0.5 * (K + K.conj().T)
    return VNKernel(g, K, hbar)


def density_centroid(D: ScalarField):
    """Center of mass of a (nonnegative) density field."""
    g = D.grid
    total = float(np.real(g.integrate_values(D.values)))
    qc = float(np.real(g.integrate_values(D.values * g.Q))) / total
    pc = float(np.real(g.integrate_values(D.values * g.P))) / total
    return qc, pc


def sigma_defect(state: HydroState):
    """max |sigma - D A| / max D, the point-particle preservation defect."""
    g = state.grid
    defect_q = np.abs(state.sigma.a_q.values - state.D.values * g.P)
    defect_p = np.abs(state.sigma.a_p.values)
    return float(np.max(np.maximum(defect_q, defect_p)) / np.max(state.D.values))
