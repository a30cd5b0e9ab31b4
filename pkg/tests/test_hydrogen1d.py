import numpy as np
import pytest

from heliosense import hydrogen1d as h1
from heliosense.constants import DEFAULT_CONSTANTS as C
from heliosense.constants import TWO_PI
from heliosense.errors import InvalidPotentialError, ResolutionError

OPERATING_FIELD = 5.69e3  # V/m at 0.1 V bias


@pytest.fixture(scope="module")
def zero_field_spectrum():
    return h1.solve_spectrum(h1.default_potential(0.0), n_levels=4)


@pytest.fixture(scope="module")
def operating_spectrum():
    return h1.solve_spectrum(h1.default_potential(OPERATING_FIELD), n_levels=4)


class TestZeroFieldLimit:
    def test_energies_match_analytic_series(self, zero_field_spectrum):
        exact = h1.analytic_energies(np.arange(1, 5))
        rel = np.abs(zero_field_spectrum.energies - exact) / np.abs(exact)
        assert rel.max() < 1e-6

    def test_transition_frequency(self, zero_field_spectrum):
        f = zero_field_spectrum.omega_a() / TWO_PI
        assert f == pytest.approx(119e9, rel=0.02)

    def test_ground_state_mean_height(self, zero_field_spectrum):
        dip = h1.dipole_elements(zero_field_spectrum)
        assert dip.z11 == pytest.approx(1.5 * dip.r_b, rel=1e-4)

    def test_second_level_mean_height(self, zero_field_spectrum):
        dip = h1.dipole_elements(zero_field_spectrum)
        assert dip.z22 == pytest.approx(6.0 * dip.r_b, rel=1e-4)

    def test_transition_element(self, zero_field_spectrum):
        # quadrature against the closed-form value 0.558771... r_b
        dip = h1.dipole_elements(zero_field_spectrum)
        assert abs(dip.z12) == pytest.approx(0.558771 * dip.r_b, rel=1e-4)


class TestSpectrumInvariants:
    def test_orthonormality(self, operating_spectrum):
        spec = operating_spectrum
        for n in range(spec.n_levels):
            for m in range(spec.n_levels):
                target = 1.0 if n == m else 0.0
                assert abs(spec.overlap(n, m) - target) < 1e-8

    def test_node_counts(self, operating_spectrum):
        for n in range(operating_spectrum.n_levels):
            assert operating_spectrum.node_count(n) == n

    def test_tails_contained(self, operating_spectrum):
        assert operating_spectrum.tail_ratios.max() < 1e-8

    def test_energy_ascending(self, operating_spectrum):
        assert np.all(np.diff(operating_spectrum.energies) > 0)

    def test_pressing_field_raises_ground_state(self, zero_field_spectrum, operating_spectrum):
        assert operating_spectrum.energies[0] > zero_field_spectrum.energies[0]

    def test_grid_refinement_stability(self):
        lo = h1.solve_spectrum(h1.default_potential(0.0, n_points=4000), 3)
        hi = h1.solve_spectrum(h1.default_potential(0.0, n_points=8000), 3)
        rel = np.abs(lo.energies - hi.energies) / np.abs(hi.energies)
        assert rel.max() < 1e-6


class TestHellmannFeynman:
    def test_level_slopes_match_dipoles(self):
        step = 50.0  # V/m
        spec0 = h1.solve_spectrum(h1.default_potential(OPERATING_FIELD - step), 3)
        spec1 = h1.solve_spectrum(h1.default_potential(OPERATING_FIELD + step), 3)
        mid = h1.solve_spectrum(h1.default_potential(OPERATING_FIELD), 3)
        dip = h1.dipole_elements(mid)
        for n in range(2):
            slope = (spec1.energies[n] - spec0.energies[n]) / (2 * step)
            assert slope == pytest.approx(C.e * dip.z_nm[n, n], rel=1e-4)


class TestCompleteness:
    def test_dipole_sum_rule_from_below(self):
        spec = h1.solve_spectrum(h1.default_potential(OPERATING_FIELD), n_levels=8)
        dip = h1.dipole_elements(spec)
        z2_exact = float(
            np.sum(spec.wavefunctions[0] ** 2 * spec.grid**2) * spec.dz
        )
        partial = [
            float(np.sum(dip.z_nm[0, : m + 1] ** 2)) for m in range(spec.n_levels)
        ]
        assert all(p <= z2_exact * (1 + 1e-12) for p in partial)
        assert partial == sorted(partial)
        # eight bound levels carry ~98% of the sum rule; the rest is higher states
        assert partial[-1] > 0.95 * z2_exact


class TestStarkScan:
    def test_zero_field_row_consistency(self, zero_field_spectrum):
        row = h1.stark_scan([0.0])[0]
        assert row.omega_a == pytest.approx(zero_field_spectrum.omega_a(), rel=1e-9)

    def test_monotonic_transition(self):
        fields = np.linspace(0.0, 2e4, 6)
        rows = h1.stark_scan(fields)
        omegas = [r.omega_a for r in rows]
        assert omegas == sorted(omegas)

    def test_operating_point_values(self, operating_spectrum):
        dip = h1.dipole_elements(operating_spectrum)
        rb = dip.r_b
        assert operating_spectrum.omega_a() / TWO_PI == pytest.approx(155.4e9, rel=0.005)
        assert (dip.z22 - dip.z11) / rb == pytest.approx(2.97, rel=0.01)
        assert abs(dip.z12) / rb == pytest.approx(0.613, rel=0.01)

    def test_find_160ghz_field(self):
        found = h1.find_field_for_transition(TWO_PI * 160e9)
        spec = h1.solve_spectrum(h1.default_potential(found), 2)
        assert spec.omega_a() / TWO_PI == pytest.approx(160e9, rel=1e-4)
        # the resolved field sits near the 56.9 V/cm reading, far from 569
        v_per_cm = found / 100.0
        assert abs(v_per_cm - 56.9) < abs(v_per_cm - 569.0)

    def test_high_field_dipole_element(self):
        spec = h1.solve_spectrum(h1.default_potential(5.69e4), 2)
        dip = h1.dipole_elements(spec)
        assert abs(dip.z12) / dip.r_b == pytest.approx(0.509, rel=0.01)

    def test_negative_field_rejected(self):
        with pytest.raises(InvalidPotentialError):
            h1.stark_scan([-10.0])


class TestBohrRadius:
    def test_published_value(self):
        assert h1.bohr_radius() == pytest.approx(7.6e-9, rel=0.01)

    def test_inverse_scaling_with_strength(self, consts):
        import dataclasses

        stronger = dataclasses.replace(consts, eps_he=consts.eps_he)
        rb = h1.bohr_radius(consts)
        assert rb == pytest.approx(consts.hbar**2 / (consts.m_e * consts.image_strength))

    def test_strength_consistency(self, consts):
        lam = consts.image_strength
        rb = h1.bohr_radius(consts)
        assert lam * rb == pytest.approx(consts.hbar**2 / consts.m_e, rel=1e-12)


class TestValidation:
    def test_negative_pressing_field(self):
        with pytest.raises(InvalidPotentialError):
            h1.default_potential(-100.0)

    def test_single_level_request(self):
        with pytest.raises(InvalidPotentialError):
            h1.solve_spectrum(h1.default_potential(0.0), n_levels=1)

    def test_tail_failure_without_extension(self):
        pot = h1.default_potential(0.0, z_max_rb=20.0, n_points=1000)
        with pytest.raises(ResolutionError):
            h1.solve_spectrum(pot, n_levels=4, auto_extend=False)

    def test_auto_extension_recovers(self):
        pot = h1.default_potential(0.0, z_max_rb=40.0, n_points=2000)
        spec = h1.solve_spectrum(pot, n_levels=4, auto_extend=True)
        assert spec.tail_ratios.max() < 1e-8
        exact = h1.analytic_energies(np.arange(1, 5))
        assert np.abs((spec.energies - exact) / exact).max() < 1e-6

    def test_dipole_symmetry(self, operating_spectrum):
        dip = h1.dipole_elements(operating_spectrum)
        assert np.abs(dip.z_nm - dip.z_nm.T).max() < 1e-10 * np.abs(dip.z_nm).max()

    def test_diagonal_dipoles_positive(self, operating_spectrum):
        dip = h1.dipole_elements(operating_spectrum)
        assert np.all(np.diag(dip.z_nm) > 0.0)
