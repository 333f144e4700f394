"""Grid construction, derivatives, quadrature, and step adjustment."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kvhsim.grid import (
    FD4,
    PERIODIC,
    GridError,
    GridMismatchError,
    NonFiniteFieldError,
    PhaseGrid,
    ScalarField,
    divergence,
    integrate,
    l1_norm,
    l2_norm,
    partial_p,
    partial_q,
    poisson_bracket,
    time_steps,
)


def make_grid(n=64, bc=PERIODIC, lo=-np.pi, hi=np.pi):
    return PhaseGrid(lo, hi, lo, hi, n, n, bc)


class TestConstruction:
    def test_node_layout_excludes_right_edge(self):
        g = PhaseGrid(0.0, 1.0, -1.0, 1.0, 4, 8)
        assert g.dq == pytest.approx(0.25)
        assert g.dp == pytest.approx(0.25)
        np.testing.assert_allclose(g.q, [0.0, 0.25, 0.5, 0.75])
        assert g.p[-1] == pytest.approx(1.0 - g.dp)

    def test_coordinate_arrays_shape(self):
        g = PhaseGrid(0.0, 1.0, 0.0, 2.0, 3, 5)
        assert g.Q.shape == (3, 5)
        assert np.all(g.Q[:, 0] == g.q)
        assert np.all(g.P[0, :] == g.p)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n_q=0),
            dict(n_p=-1),
            dict(q_max=-9.0),
            dict(bc="dirichlet"),
        ],
    )
    def test_invalid_construction(self, kwargs):
        base = dict(q_min=-8.0, q_max=8.0, p_min=-8.0, p_max=8.0, n_q=8, n_p=8)
        base.update(kwargs)
        with pytest.raises(GridError):
            PhaseGrid(**base)

    def test_field_shape_mismatch(self):
        g = make_grid(8)
        with pytest.raises(GridError):
            ScalarField(g, np.zeros((8, 9)))


class TestDerivatives:
    def test_spectral_exact_on_trig(self):
        g = make_grid(32)
        f = np.sin(3 * g.Q) * np.cos(2 * g.P)
        np.testing.assert_allclose(
            g.ddq(f), 3 * np.cos(3 * g.Q) * np.cos(2 * g.P), atol=1e-12
        )
        np.testing.assert_allclose(
            g.ddp(f), -2 * np.sin(3 * g.Q) * np.sin(2 * g.P), atol=1e-12
        )

    def test_fd4_exact_on_cubic(self):
        # 5-point stencils (interior and one-sided) are exact on cubics
        g = make_grid(24, bc=FD4, lo=-2.0, hi=2.0)
        f = g.Q**3 - 2 * g.Q * g.P + g.P**2
        np.testing.assert_allclose(g.ddq(f), 3 * g.Q**2 - 2 * g.P, atol=1e-10)
        np.testing.assert_allclose(g.ddp(f), -2 * g.Q + 2 * g.P, atol=1e-10)

    def test_fd4_fourth_order_convergence(self):
        errs = []
        for n in (32, 64):
            g = make_grid(n, bc=FD4, lo=-1.0, hi=1.0)
            f = np.exp(g.Q) * np.sin(g.P)
            err = np.max(np.abs(g.ddq(f) - f))
            errs.append(err)
        assert errs[0] / errs[1] > 12.0

    def test_partial_wrappers_match_grid_methods(self):
        g = make_grid(16)
        f = ScalarField(g, np.cos(g.Q + 2 * g.P))
        np.testing.assert_allclose(partial_q(f).values, g.ddq(f.values))
        np.testing.assert_allclose(partial_p(f).values, g.ddp(f.values))

    def test_nonfinite_rejected(self):
        g = make_grid(8)
        bad = np.zeros((8, 8))
        bad[3, 3] = np.nan
        with pytest.raises(NonFiniteFieldError):
            partial_q(ScalarField(g, bad))


class TestBracketAndMeasure:
    def test_bracket_canonical_pair(self):
        # {sin q, sin p} = cos q cos p
        g = make_grid(48)
        f = ScalarField(g, np.sin(g.Q))
        h = ScalarField(g, np.sin(g.P))
        np.testing.assert_allclose(
            poisson_bracket(f, h).values, np.cos(g.Q) * np.cos(g.P), atol=1e-11
        )

    def test_bracket_antisymmetry(self):
        g = make_grid(32)
        f = ScalarField(g, np.sin(g.Q) * np.cos(g.P))
        h = ScalarField(g, np.cos(2 * g.Q + g.P))
        fh = poisson_bracket(f, h).values
        hf = poisson_bracket(h, f).values
        np.testing.assert_allclose(fh, -hf, atol=1e-12)

    def test_bracket_with_constant_vanishes(self):
        g = make_grid(16)
        f = ScalarField(g, np.sin(g.Q))
        c = ScalarField(g, np.full((16, 16), 2.5))
        assert np.max(np.abs(poisson_bracket(f, c).values)) < 1e-12

    def test_grid_mismatch_rejected(self):
        f = ScalarField(make_grid(16), np.zeros((16, 16)))
        h = ScalarField(make_grid(16, lo=0.0, hi=1.0), np.zeros((16, 16)))
        with pytest.raises(GridMismatchError):
            poisson_bracket(f, h)

    def test_quadrature_and_norms(self):
        g = PhaseGrid(-8, 8, -8, 8, 128, 128)
        env = np.exp(-(g.Q**2 + g.P**2) / 2) / (2 * np.pi)
        f = ScalarField(g, env)
        assert integrate(f) == pytest.approx(1.0, abs=1e-12)
        assert l1_norm(f) == pytest.approx(1.0, abs=1e-12)
        assert l2_norm(f) == pytest.approx(1.0 / (2 * np.sqrt(np.pi)), abs=1e-12)

    def test_divergence_of_rotation_field(self):
        g = make_grid(32)
        v_q = ScalarField(g, np.sin(g.P))
        v_p = ScalarField(g, np.cos(g.Q))
        assert np.max(np.abs(divergence(v_q, v_p).values)) < 1e-12


class TestTimeSteps:
    def test_endpoint_exact(self):
        n, dt = time_steps(2 * np.pi, 1e-3)
        assert n * dt == pytest.approx(2 * np.pi, rel=1e-15)
        assert abs(dt - 1e-3) < 1e-6

    def test_zero_and_negative(self):
        assert time_steps(0.0, 1e-3) == (0, 1e-3)
        assert time_steps(-1.0, 1e-3) == (0, 1e-3)

    @given(
        t=st.floats(1e-3, 1e3, allow_nan=False),
        dt=st.floats(1e-5, 1.0, allow_nan=False),
    )
    def test_property_lands_on_t_final(self, t, dt):
        n, adj = time_steps(t, dt)
        assert n >= 1
        assert math.isclose(n * adj, t, rel_tol=1e-12)
