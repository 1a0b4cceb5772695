import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from pdem import semiclassical as sc
from pdem import exact
from pdem.core import Constant, HardWall, Lead, Linear, PiecewiseConstant, Problem, Scattering, Tabulated, linear_well
from pdem.errors import DomainError, SearchError, TopologyError

TABLE_WKB = [0.0253, 0.1012, 0.2278, 0.4049, 0.6327, 0.9111, 1.2401, 1.6197, 2.0499, 2.5308]


def finite_well(V0=0.3, L=5.0, m_in=0.067, m_out=0.092, pad=6.0):
    mass = PiecewiseConstant((0.0, L), (m_out, m_in, m_out))
    pot = PiecewiseConstant((0.0, L), (V0, 0.0, V0))
    return Problem(-pad, L + pad, mass, pot)


class TestPhase:
    def test_constant(self):
        p = Problem(0, 4, Constant(0.5))
        k = math.sqrt(0.5 * 0.2 / p.C)
        assert sc.phase_integral(p, 0.2, 0.5, 3.0) == pytest.approx(k * 2.5, rel=1e-14)
        assert sc.phase_integral(p, 0.2, 0.5, 3.0, "quadrature") == pytest.approx(k * 2.5, rel=1e-11)

    def test_linear_well_first_level(self, well):
        assert sc.phase_integral(well, 0.0253, -5, 5) == pytest.approx(math.pi, abs=2e-3)

    def test_closed_vs_quadrature(self, well):
        for E in (0.03, 0.4, 2.0):
            closed = sc.phase_integral(well, E, -5, 5, "closed")
            quad = sc.phase_integral(well, E, -5, 5, "quadrature")
            assert quad == pytest.approx(closed, abs=1e-10)

    @settings(max_examples=50, deadline=None)
    @given(a=st.floats(-5, 5), b=st.floats(-5, 5), c=st.floats(-5, 5), E=st.floats(0.01, 3))
    def test_additivity(self, a, b, c, E):
        p = linear_well(0.1, 0.2, 5)
        lhs = sc.phase_integral(p, E, a, b) + sc.phase_integral(p, E, b, c)
        assert lhs == pytest.approx(sc.phase_integral(p, E, a, c), abs=1e-12)

    def test_additivity_quadrature(self):
        x = np.linspace(0, 4, 41)
        p = Problem(0, 4, Tabulated(x, 0.1 + 0.01 * x**2), Tabulated(x, 0.05 * np.sin(x)))
        lhs = sc.phase_integral(p, 0.3, 0, 1.3) + sc.phase_integral(p, 0.3, 1.3, 4)
        assert lhs == pytest.approx(sc.phase_integral(p, 0.3, 0, 4), abs=1e-9)

    def test_forbidden(self):
        p = Problem(0, 1, Constant(1.0), Linear(0, 1, 0.0, 1.0))
        with pytest.raises(DomainError):
            sc.phase_integral(p, 0.5, 0, 1)

    def test_nonnegative(self, well):
        assert sc.phase_integral(well, 0.1, -2, 3) > 0


class TestLinearWellEnergy:
    @pytest.mark.parametrize("n", range(1, 11))
    def test_table_column(self, n):
        assert sc.linear_well_energy(0.1, 0.2, 5, n) == pytest.approx(TABLE_WKB[n - 1], abs=5e-4)

    def test_equal_mass_limit(self):
        assert sc.linear_well_energy(1, 1, 5, 1) == pytest.approx(math.pi**2 * 0.0380998 / 100, rel=1e-14)
        assert sc.linear_well_energy(1, 1, 5, 1) == pytest.approx(0.003761, abs=1e-6)
        # continuous across m1 -> m2
        assert sc.linear_well_energy(1 + 1e-7, 1, 5, 3) == pytest.approx(sc.linear_well_energy(1, 1, 5, 3), rel=1e-6)

    @settings(max_examples=100, deadline=None)
    @given(m1=st.floats(0.02, 2), m2=st.floats(0.02, 2), a=st.floats(0.5, 20), lam=st.floats(0.1, 10),
           n=st.integers(1, 20))
    def test_scaling(self, m1, m2, a, lam, n):
        E = sc.linear_well_energy(m1, m2, a, n)
        assert sc.linear_well_energy(lam * m1, lam * m2, a, n) == pytest.approx(E / lam, rel=1e-12)
        assert sc.linear_well_energy(m1, m2, lam * a, n) == pytest.approx(E / lam**2, rel=1e-12)
        assert sc.linear_well_energy(m1, m2, a, 2 * n) == pytest.approx(4 * E, rel=1e-12)

    @pytest.mark.parametrize("args", [(0.1, 0.2, 5, 0), (0.1, 0.2, -5, 1), (0, 0.2, 5, 1)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            sc.linear_well_energy(*args)


class TestQuantize:
    def test_matches_closed_form(self, well):
        for n in range(1, 11):
            E = sc.hard_wall_quantize(well, n)
            assert E == pytest.approx(sc.linear_well_energy(0.1, 0.2, 5, n), rel=1e-9)

    def test_constant_mass(self):
        p = Problem(0, 10, Constant(1.0))
        for n in (1, 2, 5):
            assert sc.hard_wall_quantize(p, n) == pytest.approx(oracles.infinite_well(1, 10, n), rel=1e-9)

    def test_increasing(self, well):
        levels = [sc.hard_wall_quantize(well, n) for n in range(1, 8)]
        assert np.all(np.diff(levels) > 0)

    def test_hint(self, well):
        E = sc.hard_wall_quantize(well, 2, (0.05, 0.2))
        assert E == pytest.approx(sc.linear_well_energy(0.1, 0.2, 5, 2), rel=1e-9)
        with pytest.raises(SearchError):
            sc.hard_wall_quantize(well, 2, (0.2, 0.3))

    def test_with_potential(self):
        p = Problem(0, 10, Constant(1.0), Constant(0.5))
        assert sc.hard_wall_quantize(p, 2) == pytest.approx(0.5 + oracles.infinite_well(1, 10, 2), rel=1e-9)


class TestWavefunction:
    def test_sine_form(self):
        p = Problem(0, 10, Constant(1.0))
        E = oracles.infinite_well(1, 10, 3)
        wf = sc.wkb_wavefunction(p, E, 1 / 2j, -1 / 2j, points=1001)
        k = math.sqrt(E / p.C)
        np.testing.assert_allclose(wf.values, np.sqrt(1 / k) * np.sin(k * wf.grid), atol=1e-12)
        assert abs(wf.values[0]) < 1e-14 and abs(wf.values[-1]) < 1e-12

    def test_nodes(self, well):
        for n in (1, 4, 7):
            wf = sc.wkb_state(well, n)
            assert wf.count_nodes() == n - 1
            assert wf.energy == pytest.approx(sc.linear_well_energy(0.1, 0.2, 5, n), rel=1e-9)
            assert wf.norm() == pytest.approx(1, abs=1e-8)

    def test_envelope_sqrt_mass(self, well):
        wf = sc.wkb_state(well, 8, points=8001)
        fit = sc.envelope_fit(wf, well)
        assert fit.residual < 0.01

    def test_turning_point_rejected(self):
        p = Problem(0, 1, Constant(1.0), Linear(0, 1, 0.0, 1.0))
        with pytest.raises(DomainError):
            sc.wkb_wavefunction(p, 0.5, 1, 0)

    def test_envelope_no_peaks(self, well):
        from pdem.core import Wavefunction
        wf = Wavefunction(np.linspace(-5, 5, 11), np.linspace(0, 1, 11), 0.1, "wkb")
        with pytest.raises(ValueError):
            sc.envelope_fit(wf, well)


def barrier(V0=0.3, w=2.0):
    return Problem(0, w, Constant(1.0), Constant(V0), Scattering(Lead(1.0), Lead(1.0)))


def smooth_barrier(V0=0.5, width=6.0, m=0.5):
    x = np.linspace(0, width, 2001)
    V = V0 * np.sin(np.pi * x / width) ** 2
    return Problem(0, width, Constant(m), Tabulated(x, V), Scattering(Lead(m), Lead(m)))


class TestTunneling:
    def test_above_barrier(self):
        assert sc.wkb_transmission(barrier(), 0.5) == 1.0
        assert sc.forbidden_interval(barrier(), 0.5) is None

    def test_rectangular_exponent(self):
        for E in (0.05, 0.15, 0.25):
            kappa = math.sqrt((0.3 - E) / 0.0380998)
            assert sc.wkb_exponent(barrier(), E) == pytest.approx(2 * kappa * 2.0, rel=1e-12)

    def test_interval_endpoints(self):
        x = np.linspace(-3, 3, 601)
        p = Problem(-3, 3, Constant(1.0), Tabulated(x, 0.4 - 0.1 * x**2))
        xa, xb = sc.forbidden_interval(p, 0.2)
        assert xa == pytest.approx(-math.sqrt(2), abs=1e-3)
        assert xb == pytest.approx(math.sqrt(2), abs=1e-3)
        assert p.V(xa) > 0.2 and p.V(xb) > 0.2

    def test_two_intervals(self):
        pot = PiecewiseConstant((1.0, 2.0, 3.0, 4.0), (0.0, 1.0, 0.0, 1.0, 0.0))
        p = Problem(0, 5, Constant(1.0), pot, Scattering(Lead(1.0), Lead(1.0)))
        with pytest.raises(TopologyError):
            sc.wkb_transmission(p, 0.5)

    def test_thick_smooth_barrier_within_factor_three(self):
        from pdem import tmm
        p = smooth_barrier()
        for E in (0.05, 0.1, 0.2):
            assert sc.wkb_exponent(p, E) >= 6
            ratio = tmm.transmission(p, E, 4000)[0] / sc.wkb_transmission(p, E)
            assert abs(math.log(ratio)) < math.log(3)

    def test_thick_rectangular_prefactor(self):
        # for a square barrier the neglected prefactor is 16 E (V0 - E) / V0^2
        from pdem import tmm
        for E in (0.02, 0.15):
            p = barrier(w=4.0)
            assert sc.wkb_exponent(p, E) >= 6
            ratio = tmm.transmission(p, E, 50)[0] / sc.wkb_transmission(p, E)
            assert ratio == pytest.approx(16 * E * (0.3 - E) / 0.09, rel=0.02)


class TestPiecewise:
    def test_finite_well_oracle(self):
        p = finite_well()
        got = sc.piecewise_wkb_bound_states(p, 0.0, 5.0, tol=1e-12)
        ref = oracles.finite_well_levels(5.0, 0.3, 0.067, 0.092)
        assert len(got) == len(ref) >= 2
        np.testing.assert_allclose(got, ref, atol=1e-6)

    def test_deep_well_limit(self):
        # penetration shifts levels by ~2/(q L) with q = kappa/m*; m* = 1, L = 10 puts that below 1%
        L = 10.0
        p = finite_well(V0=100.0, L=L, m_in=1.0, m_out=1.0, pad=1.0)
        hard = Problem(0, L, Constant(1.0))
        got = sc.piecewise_wkb_bound_states(p, 0.0, L, E_range=(1e-4, 0.1), tol=1e-13)
        for n in (1, 2, 3):
            assert got[n - 1] == pytest.approx(sc.hard_wall_quantize(hard, n), rel=0.01)

    def test_parity_alternates(self):
        p = finite_well(V0=1.0, L=6.0, pad=4.0)
        levels = sc.piecewise_wkb_bound_states(p, 0.0, 6.0)
        assert len(levels) >= 3
        for n, E in enumerate(levels):
            wf = sc.piecewise_wkb_wavefunction(p, E, 0.0, 6.0, points=2001)
            psi = wf.values
            mirror = psi[::-1]
            sign = 1 if n % 2 == 0 else -1
            assert np.abs(psi - sign * mirror).max() < 1e-6 * np.abs(psi).max()
            assert wf.count_nodes() == n

    def test_wavefunction_matches_tmm(self):
        from pdem import tmm
        # pad wide enough that the hard walls of the reference shot are invisible
        p = finite_well(pad=15.0)
        E = sc.piecewise_wkb_bound_states(p, 0.0, 5.0, tol=1e-13)[0]
        wf = sc.piecewise_wkb_wavefunction(p, E, 0.0, 5.0, points=3501)
        ref = tmm.eigenstate(p, E, N=3500, points_per_slab=8)
        ref_vals = ref(wf.grid)
        ref_vals = ref_vals / np.sqrt(np.trapezoid(abs(ref_vals) ** 2, wf.grid))
        ref_vals *= np.sign(ref_vals[np.argmax(abs(ref_vals))].real)
        assert np.abs(wf.values - ref_vals).max() < 1e-3

    def test_empty_range(self):
        assert sc.piecewise_wkb_bound_states(finite_well(), 0.0, 5.0, E_range=(0.001, 0.002)) == []

    def test_domain_errors(self):
        p = finite_well()
        with pytest.raises(DomainError):
            sc.piecewise_wkb_condition(p, 0.5, 0.0, 5.0)
