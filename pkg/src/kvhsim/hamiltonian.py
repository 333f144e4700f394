"""Classical Hamiltonians and derived geometric objects.

Hamiltonians carry closed-form first (and optionally second) partials so
that characteristics-based oracles can be evaluated off-grid without any
dependence on the field discretization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .grid import PhaseGrid, ScalarField

Func2 = Callable[[np.ndarray, np.ndarray], np.ndarray]


class HamiltonianError(ValueError):
    pass


class DomainExitError(RuntimeError):
    """A characteristic left the truncated phase-space box."""

    def __init__(self, message, indices=None):
        super().__init__(message)
        self.indices = indices


@dataclass(frozen=True)
class HamiltonianSpec:
    """Classical Hamiltonian with closed-form partial derivatives.

    h_qq / h_qp / h_pp are optional second partials, needed only by
    consumers that differentiate the Hamiltonian vector field (one-form
    transport, hydrodynamic Lie derivatives).
    """

    name: str
    h: Func2
    h_q: Func2
    h_p: Func2
    h_qq: Optional[Func2] = None
    h_qp: Optional[Func2] = None
    h_pp: Optional[Func2] = None
    validate: bool = True

    def __post_init__(self):
        if self.validate:
            self._check_partials()

    def _check_partials(self, n_samples: int = 32, step: float = 1e-5) -> None:
        rng = np.random.default_rng(1234)
        q = rng.uniform(-3.0, 3.0, n_samples)
        p = rng.uniform(-3.0, 3.0, n_samples)
        fd_q = (self.h(q + step, p) - self.h(q - step, p)) / (2 * step)
        fd_p = (self.h(q, p + step) - self.h(q, p - step)) / (2 * step)
        for fd, exact, label in ((fd_q, self.h_q(q, p), "dH/dq"), (fd_p, self.h_p(q, p), "dH/dp")):
            scale = np.abs(fd) + np.abs(exact) + 1.0
            rel = np.max(np.abs(fd - exact) / scale)
            if rel > 1e-6:
                raise HamiltonianError(
                    f"{self.name}: supplied {label} disagrees with finite "
                    f"differences (relative error {rel:.2e})"
                )

    def lagrangian(self, q: np.ndarray, p: np.ndarray) -> np.ndarray:
        """Phase-space Lagrangian p * dH/dp - H."""
        return p * self.h_p(q, p) - self.h(q, p)


# -- polynomial Hamiltonians ----------------------------------------------

def _poly_eval(coeffs: dict, q, p):
    out = np.zeros(np.broadcast(q, p).shape)
    for (i, j), c in coeffs.items():
        out = out + c * q**i * p**j
    return out


def _poly_diff(coeffs: dict, var: str) -> dict:
    out = {}
    for (i, j), c in coeffs.items():
        if var == "q" and i > 0:
            out[(i - 1, j)] = out.get((i - 1, j), 0.0) + c * i
        elif var == "p" and j > 0:
            out[(i, j - 1)] = out.get((i, j - 1), 0.0) + c * j
    return out


def _poly_mul(a: dict, b: dict) -> dict:
    out = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0.0) + c1 * c2
    return out


def _poly_sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for key, c in b.items():
        out[key] = out.get(key, 0.0) - c
    return {k: v for k, v in out.items() if v != 0.0}


def poly_poisson(a: dict, b: dict) -> dict:
    """Coefficient table of the canonical bracket of two polynomials."""
    return _poly_sub(
        _poly_mul(_poly_diff(a, "q"), _poly_diff(b, "p")),
        _poly_mul(_poly_diff(a, "p"), _poly_diff(b, "q")),
    )


def polynomial_hamiltonian(name: str, coeffs: dict) -> "PolynomialHamiltonian":
    return PolynomialHamiltonian(name, coeffs)


class PolynomialHamiltonian(HamiltonianSpec):
    """Hamiltonian given by a coefficient table {(i, j): c} for c q^i p^j."""

    def __init__(self, name: str, coeffs: dict):
        coeffs = {tuple(k): float(v) for k, v in coeffs.items() if v != 0.0}
        object.__setattr__(self, "coeffs", coeffs)  # base dataclass is frozen
        dq = _poly_diff(coeffs, "q")
        dp = _poly_diff(coeffs, "p")
        super().__init__(
            name=name,
            h=lambda q, p: _poly_eval(coeffs, q, p),
            h_q=lambda q, p: _poly_eval(dq, q, p),
            h_p=lambda q, p: _poly_eval(dp, q, p),
            h_qq=lambda q, p: _poly_eval(_poly_diff(dq, "q"), q, p),
            h_qp=lambda q, p: _poly_eval(_poly_diff(dq, "p"), q, p),
            h_pp=lambda q, p: _poly_eval(_poly_diff(dp, "p"), q, p),
        )

    def poisson_with(self, other: "PolynomialHamiltonian") -> "PolynomialHamiltonian":
        return PolynomialHamiltonian(
            f"{{{self.name},{other.name}}}", poly_poisson(self.coeffs, other.coeffs)
        )


def constant_hamiltonian(c: float, name: str | None = None) -> PolynomialHamiltonian:
    return PolynomialHamiltonian(name or f"const({c})", {(0, 0): c})


# -- scenario library -----------------------------------------------------

def _pendulum() -> HamiltonianSpec:
    return HamiltonianSpec(
        name="pendulum",
        h=lambda q, p: 0.5 * p**2 - np.cos(q),
        h_q=lambda q, p: np.sin(q) + 0.0 * p,
        h_p=lambda q, p: p + 0.0 * q,
        h_qq=lambda q, p: np.cos(q) + 0.0 * p,
        h_qp=lambda q, p: np.zeros(np.broadcast(q, p).shape),
        h_pp=lambda q, p: np.ones(np.broadcast(q, p).shape),
    )


def scenario_hamiltonian(name: str) -> HamiltonianSpec:
    try:
        return _SCENARIOS[name]()
    except KeyError:
        raise HamiltonianError(
            f"unknown Hamiltonian {name!r}; available: {sorted(_SCENARIOS)}"
        ) from None


_SCENARIOS = {
    "harmonic": lambda: PolynomialHamiltonian("harmonic", {(2, 0): 0.5, (0, 2): 0.5}),
    "free": lambda: PolynomialHamiltonian("free", {(0, 2): 0.5}),
    "quartic": lambda: PolynomialHamiltonian("quartic", {(0, 2): 0.5, (4, 0): 0.25}),
    "pendulum": _pendulum,
}

SCENARIO_NAMES = tuple(sorted(_SCENARIOS))


# -- derived geometric objects --------------------------------------------

@dataclass
class OneForm:
    """Covector field with components (a_q, a_p) on a common grid."""

    a_q: ScalarField
    a_p: ScalarField

    def __post_init__(self):
        if not self.a_q.grid.same_geometry(self.a_p.grid):
            raise HamiltonianError("one-form components live on different grids")

    @property
    def grid(self) -> PhaseGrid:
        return self.a_q.grid


def hamiltonian_vector_field(H: HamiltonianSpec, grid: PhaseGrid):
    """X_H = (dH/dp, -dH/dq) sampled on the grid."""
    return (
        ScalarField(grid, self_broadcast(H.h_p(grid.Q, grid.P), grid)),
        ScalarField(grid, self_broadcast(-H.h_q(grid.Q, grid.P), grid)),
    )


def self_broadcast(values, grid: PhaseGrid) -> np.ndarray:
    return np.broadcast_to(np.asarray(values, dtype=float), (grid.n_q, grid.n_p)).copy()


def phase_space_lagrangian(H: HamiltonianSpec, grid: PhaseGrid) -> ScalarField:
    """L_H = p dH/dp - H on the grid."""
    return ScalarField(grid, self_broadcast(H.lagrangian(grid.Q, grid.P), grid))


def canonical_one_form(grid: PhaseGrid) -> OneForm:
    """The tautological one-form p dq."""
    return OneForm(
        ScalarField(grid, grid.P.copy()),
        ScalarField(grid, np.zeros((grid.n_q, grid.n_p))),
    )


def jmap(a: OneForm):
    """Symplectic-inverse map: (a_q, a_p) -> (a_p, -a_q)."""
    return (a.a_p.copy(), -a.a_q)


# -- flows -----------------------------------------------------------------

def _rk4_step(H: HamiltonianSpec, q, p, a, h: float, with_action: bool):
    def rhs(q, p):
        dq = H.h_p(q, p)
        dp = -H.h_q(q, p)
        da = H.lagrangian(q, p) if with_action else 0.0
        return dq, dp, da

    k1 = rhs(q, p)
    k2 = rhs(q + 0.5 * h * k1[0], p + 0.5 * h * k1[1])
    k3 = rhs(q + 0.5 * h * k2[0], p + 0.5 * h * k2[1])
    k4 = rhs(q + h * k3[0], p + h * k3[1])
    q_new = q + (h / 6) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    p_new = p + (h / 6) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    a_new = a + (h / 6) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]) if with_action else a
    return q_new, p_new, a_new


def flow_with_action(H: HamiltonianSpec, t: float, q0, p0, dt: float = 1e-3):
    """Integrate the Hamiltonian flow together with the action integral.

    Returns (q(t), p(t), integral of L_H along the trajectory). Negative t
    integrates backwards. Vectorized over arrays of initial points.
    """
    q = np.asarray(q0, dtype=float).copy()
    p = np.asarray(p0, dtype=float).copy()
    a = np.zeros_like(q)
    if t == 0:
        return q, p, a
    n_steps = max(1, int(math.ceil(abs(t) / abs(dt))))
    h = t / n_steps
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n_steps):
            q, p, a = _rk4_step(H, q, p, a, h, with_action=True)
    return q, p, a


def flow_map(H: HamiltonianSpec, t: float, z0, dt: float = 1e-3):
    """Time-t flow of X_H from z0 = (q0, p0) with classical RK4."""
    q, p, _ = flow_with_action(H, t, z0[0], z0[1], dt)
    return q, p


def out_of_domain_mask(grid: PhaseGrid, q, p) -> np.ndarray:
    """True where a point lies outside the grid's box (or diverged).

    A sub-cell slack absorbs round-off from flows that graze the
    boundary, so nodes mapped exactly onto an edge are kept.
    """
    slack = 1e-9 * min(grid.dq, grid.dp)
    with np.errstate(invalid="ignore"):
        return (
            ~np.isfinite(q)
            | ~np.isfinite(p)
            | (q < grid.q_min - slack)
            | (q > grid.q_max + slack)
            | (p < grid.p_min - slack)
            | (p > grid.p_max + slack)
        )


def flow_jacobian(H: HamiltonianSpec, t: float, q, p, dt: float = 1e-3, step: float = 1e-5):
    """Jacobian determinant of the time-t flow, by central differences."""
    qq, pq = flow_map(H, t, (q + step, p), dt)
    qm, pm = flow_map(H, t, (q - step, p), dt)
    qp_, pp_ = flow_map(H, t, (q, p + step), dt)
    qpm, ppm = flow_map(H, t, (q, p - step), dt)
    dqdq = (qq - qm) / (2 * step)
    dpdq = (pq - pm) / (2 * step)
    dqdp = (qp_ - qpm) / (2 * step)
    dpdp = (pp_ - ppm) / (2 * step)
    return dqdq * dpdp - dqdp * dpdq
