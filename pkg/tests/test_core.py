import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdem.core import (HBAR2_OVER_2M0, Constant, Engine, HardWall, Lead, Linear, PhysicalConstants,
                       PiecewiseConstant, Problem, Scattering, Tabulated, Wavefunction,
                       codata_hbar2_over_2m0, equation_residual, eval_profile, linear_well, normalize,
                       profile_derivative, wavenumber)
from pdem.errors import DegenerateWavefunctionError, ProfileError


class TestConstants:
    def test_default_close_to_codata(self):
        assert abs(HBAR2_OVER_2M0 / codata_hbar2_over_2m0() - 1) < 1e-3

    def test_positive(self):
        with pytest.raises(ValueError):
            PhysicalConstants(0.0)
        with pytest.raises(ValueError):
            PhysicalConstants(-1.0)


class TestProfiles:
    def test_linear_endpoints_and_midpoint(self, well):
        assert well.m(-5.0) == pytest.approx(0.2, abs=1e-15)
        assert well.m(0.0) == pytest.approx(0.15, abs=1e-15)
        assert well.m(5.0) == pytest.approx(0.1, abs=1e-15)

    def test_constant(self):
        assert eval_profile(Constant(0.067), 123.4) == 0.067
        assert np.all(eval_profile(Constant(0.067), np.linspace(-1, 1, 5)) == 0.067)

    @settings(max_examples=50, deadline=None)
    @given(m1=st.floats(0.01, 2), m2=st.floats(0.01, 2), a=st.floats(0.5, 50))
    def test_linear_matches_closed_line(self, m1, m2, a):
        xs = np.random.default_rng(1).uniform(-a, a, 1000)
        line = (m1 - m2) / (2 * a) * xs + (m1 + m2) / 2
        got = linear_well(m1, m2, a).m(xs)
        np.testing.assert_allclose(got, line, rtol=1e-13, atol=0)

    def test_piecewise_sides(self):
        p = PiecewiseConstant((0.0, 1.0), (3.0, 1.0, 2.0))
        assert eval_profile(p, -1) == 3.0
        assert eval_profile(p, 0.5) == 1.0
        assert eval_profile(p, 1.0) == 2.0
        assert eval_profile(p, 1.0, side="left") == 1.0
        assert eval_profile(p, 0.0, side="left") == 3.0

    def test_tabulated_interpolates_and_clamps(self):
        t = Tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 4.0])
        assert eval_profile(t, 1.5) == pytest.approx(2.5)
        assert eval_profile(t, -3) == 0.0
        assert eval_profile(t, 9) == 4.0

    @pytest.mark.parametrize("make", [
        lambda: Constant(0.0, quantity="mass"),
        lambda: Linear(0, 1, 0.1, -0.1, quantity="mass"),
        lambda: PiecewiseConstant((0.0,), (1.0, -1.0), quantity="mass"),
        lambda: Tabulated([0, 1], [1, 0], quantity="mass"),
        lambda: PiecewiseConstant((1.0, 0.0), (1.0, 1.0, 1.0)),
        lambda: Tabulated([0, 0], [1, 1]),
        lambda: Linear(1, 0, 1, 1),
    ])
    def test_invalid_profiles(self, make):
        with pytest.raises(ProfileError):
            make()

    def test_problem_retags_mass(self):
        with pytest.raises(ProfileError):
            Problem(0, 1, Constant(-0.1))

    def test_linear_mass_turning_negative_inside_domain(self):
        # the line stays positive at its anchors but not everywhere it is evaluated
        p = Problem(0, 10, Linear(0, 1, 0.2, 0.1))
        with pytest.raises(ProfileError):
            p.m(5.0)

    def test_derivatives(self, well):
        assert profile_derivative(well.mass, 0.3) == pytest.approx(-0.01)
        assert profile_derivative(well.mass, 0.3, 2) == 0.0
        t = Tabulated(np.linspace(0, 1, 1001), np.linspace(0, 1, 1001) ** 2)
        assert profile_derivative(t, 0.5) == pytest.approx(1.0, rel=1e-6)

    def test_problem_rejects_empty_domain(self):
        with pytest.raises(ValueError):
            Problem(1, 1, Constant(1))

    def test_lead_mass_positive(self):
        with pytest.raises(ProfileError):
            Lead(0.0)


class TestWavenumber:
    def test_allowed(self):
        p = Problem(0, 1, Constant(0.15))
        assert wavenumber(p, 0.0258, 0.5) == pytest.approx(math.sqrt(0.0258 * 0.15 / 0.0380998))
        assert wavenumber(p, 0.0258, 0.5) == pytest.approx(0.3187, abs=1e-4)

    def test_forbidden_branch(self):
        p = Problem(0, 1, Constant(0.1), Constant(1.0))
        k = wavenumber(p, 0.0, 0.5)
        assert k.real == 0
        # sqrt(0.1 / 0.0380998) = 1.620088...
        assert k.imag == pytest.approx(math.sqrt(0.1 / 0.0380998), rel=1e-14)
        assert k.imag == pytest.approx(1.6201, abs=1e-4)

    def test_turning_point(self):
        p = Problem(0, 1, Constant(0.1), Constant(1.0))
        assert wavenumber(p, 1.0, 0.2) == 0

    def test_branch_continuity(self):
        p = Problem(0, 1, Constant(0.1), Constant(1.0))
        for d in (1e-4, 1e-8, 1e-12):
            assert abs(wavenumber(p, 1 + d, 0.5)) < 2 * math.sqrt(0.1 * d / 0.0380998)
            assert abs(wavenumber(p, 1 - d, 0.5)) < 2 * math.sqrt(0.1 * d / 0.0380998)


class TestWavefunction:
    def test_shape_checks(self):
        with pytest.raises(ValueError):
            Wavefunction(np.arange(3.0), np.ones(4), 0.0, Engine.TMM)
        with pytest.raises(ValueError):
            Wavefunction(np.array([0.0, 1.0, 1.0]), np.ones(3), 0.0, Engine.TMM)

    def test_normalize_constant(self):
        x = np.linspace(0, 1, 11)
        wf = normalize(Wavefunction(x, 2 * np.ones(11), 0.0, "tmm"))
        np.testing.assert_allclose(wf.values, 1.0, atol=1e-15)
        assert wf.normalized

    def test_normalize_sine(self):
        x = np.linspace(0, 1, 1001)
        wf = normalize(Wavefunction(x, np.sin(np.pi * x), 0.0, "wkb"))
        assert abs(wf.values).max() == pytest.approx(math.sqrt(2), abs=1e-5)
        assert wf.norm() == pytest.approx(1, abs=1e-8)

    def test_phase_convention(self):
        x = np.linspace(0, 1, 101)
        wf = normalize(Wavefunction(x, -1j * np.sin(np.pi * x), 0.0, "tmm"))
        peak = wf.values[np.argmax(abs(wf.values))]
        assert peak.imag == 0 and peak.real > 0

    def test_degenerate(self):
        with pytest.raises(DegenerateWavefunctionError):
            normalize(Wavefunction(np.linspace(0, 1, 5), np.zeros(5), 0.0, "tmm"))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
                    min_size=3, max_size=40))
    def test_normalize_idempotent(self, vals):
        vals = np.array(vals)
        if np.abs(vals).max() < 1e-6:
            vals = vals + 1.0
        wf = normalize(Wavefunction(np.linspace(0, 1, vals.size), vals, 0.0, "tmm"))
        again = normalize(wf)
        np.testing.assert_allclose(again.values, wf.values, atol=1e-14 * np.abs(wf.values).max())

    def test_nodes(self):
        x = np.linspace(0, 1, 2001)
        for n in range(1, 6):
            wf = Wavefunction(x, np.sin(n * np.pi * x), 0.0, "wkb")
            assert wf.count_nodes() == n - 1

    def test_interpolation(self):
        wf = Wavefunction(np.array([0.0, 1.0]), np.array([0, 2 + 2j]), 0.0, "tmm")
        assert wf(0.25) == pytest.approx(0.5 + 0.5j)


class TestResidual:
    def test_sine_well_second_order(self):
        L, m = 10.0, 1.0
        p = Problem(0, L, Constant(m))
        E = math.pi**2 * p.C / (m * L**2)
        res = []
        for pts in (101, 201, 401):
            x = np.linspace(0, L, pts)
            res.append(equation_residual(p, Wavefunction(x, np.sin(math.pi * x / L), E, "airy")))
        assert res[0] / res[1] == pytest.approx(4, rel=0.02)
        assert res[1] / res[2] == pytest.approx(4, rel=0.02)

    def test_needs_uniform_grid(self):
        p = Problem(0, 1, Constant(1))
        with pytest.raises(ValueError):
            equation_residual(p, Wavefunction(np.array([0, 0.1, 1.0]), np.ones(3), 1.0, "tmm"))

    def test_boundary_kinds(self):
        s = Scattering(Lead(1.0), Lead(0.5, 0.1))
        p = Problem(0, 1, Constant(1), boundary=s)
        assert p.boundary.right_lead.potential == 0.1
        assert isinstance(linear_well(0.1, 0.2, 5).boundary, HardWall)
