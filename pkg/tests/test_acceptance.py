"""Acceptance suite.

Each test prints one PASS line with the measured numbers; run with
``pytest tests/test_acceptance.py -v -s`` to see them. Tolerances are
fixed here and nowhere else.
"""

import dataclasses
import math
import time

import numpy as np
import pytest

from heliosense import dynamics, echo, hydrogen1d, params, quantum_model as qm
from heliosense.constants import DEFAULT_CONSTANTS as C
from heliosense.constants import TWO_PI


def test_criterion_1_vertical_spectrum_analytic_limit():
    start = time.perf_counter()
    spec = hydrogen1d.solve_spectrum(hydrogen1d.default_potential(0.0), n_levels=4)
    exact = hydrogen1d.analytic_energies(np.arange(1, 5))
    rel = np.abs(spec.energies - exact) / np.abs(exact)
    transition_ghz = spec.omega_a() / TWO_PI / 1e9
    elapsed = time.perf_counter() - start
    assert rel.max() < 1e-6
    assert abs(transition_ghz - 119.0) / 119.0 < 0.02
    assert elapsed < 5.0
    print(f"\nACCEPTANCE 1 PASS: zero-field levels within {rel.max():.2e} of the "
          f"closed form; transition {transition_ghz:.2f} GHz; {elapsed:.2f} s")


def test_criterion_2_stark_operating_point():
    target = TWO_PI * 160e9
    found = hydrogen1d.find_field_for_transition(target)
    spec = hydrogen1d.solve_spectrum(hydrogen1d.default_potential(found), 2)
    achieved_ghz = spec.omega_a() / TWO_PI / 1e9
    assert abs(achieved_ghz - 160.0) / 160.0 < 0.02
    v_per_cm = found / 100.0
    assert abs(v_per_cm - 56.9) < abs(v_per_cm - 569.0)
    print(f"\nACCEPTANCE 2 PASS: 160 GHz operating point at E_z = {found:.1f} V/m "
          f"= {v_per_cm:.1f} V/cm (quoted readings: 56.9 or 569 V/cm; "
          f"resolved near the smaller one)")


def test_criterion_3_trap_fit(trap_solution):
    fit, _, elapsed = trap_solution
    targets = {"e_z": 5.69e4, "q_xx": 4.04e9, "q_yy": 4.16e9, "q_zz": -8.53e9}
    devs = {
        name: abs(getattr(fit, name) - ref) / abs(ref) for name, ref in targets.items()
    }
    assert max(devs.values()) < 0.25, devs
    assert fit.cross_term_ratio < 1e-3
    assert fit.trace_ratio <= 0.05
    assert elapsed < 120.0
    print(f"\nACCEPTANCE 3 PASS: E_z {fit.e_z:.3e} V/m/V, Q_xx {fit.q_xx:.3e}, "
          f"Q_yy {fit.q_yy:.3e}, Q_zz {fit.q_zz:.3e} V/m^2/V; "
          f"max deviation {max(devs.values()):.1%}; trace ratio {fit.trace_ratio:.3f}; "
          f"solve {elapsed:.0f} s")


def test_criterion_4_parameter_chain(trap_solution):
    fit, _, _ = trap_solution
    p = params.ParameterSet().with_trap_fit(fit)
    dp = params.derive_parameters(p)
    assert abs(dp.omega_s - 3.5e9) / 3.5e9 < 0.05
    assert abs(dp.omega_x - 1.2e10) / 1.2e10 < 0.25
    eta_gap = dp.eta2 - dp.eta1
    assert abs(eta_gap - 2.4e-3) / 2.4e-3 < 0.10
    assert abs(dp.delta_s - 8.4e6) / 8.4e6 < 0.10
    # exactness of the two-photon shift at the published drive and offset
    p_published = params.ParameterSet()
    dp_published = params.derive_parameters(p_published)
    assert dp_published.omega_sz == 1.0
    print(f"\nACCEPTANCE 4 PASS: omega_s {dp.omega_s:.4g}, omega_x {dp.omega_x:.4g} "
          f"(trap fit), eta2-eta1 {eta_gap:.4g}, Delta_s {dp.delta_s:.4g}, "
          f"Omega_sz {dp_published.omega_sz} rad/s")


def test_criterion_5_sensitivity_numbers(derived):
    spec = hydrogen1d.solve_spectrum(hydrogen1d.default_potential(5.69e4), 2)
    z12 = abs(hydrogen1d.dipole_elements(spec).z12)
    e_w = params.field_from_rabi(100.0, z12)
    p_w = params.power_density(e_w)
    assert abs(e_w - 1.73e-5) / 1.73e-5 < 0.05
    assert abs(p_w - 7.9e-13) / 7.9e-13 < 0.10

    dz = derived.z22 - derived.z11
    p_sparse = params.ParameterSet()
    i0_sparse = params.image_current(p_sparse, 0.1, dz)
    p_dense = params.ParameterSet(n_s=1e12, plate_d=1e-3, plate_s=math.pi * 0.012**2)
    i0_dense = params.image_current(p_dense, 0.1, dz)
    assert 1.0 / 3.0 < i0_sparse / 0.48e-12 < 3.0
    assert 1.0 / 3.0 < i0_dense / 100e-12 < 3.0
    print(f"\nACCEPTANCE 5 PASS: E_w {e_w * 1e9 / 100:.1f} nV/cm, "
          f"P_w {p_w / 1e4:.3g} W/cm^2, i0 {i0_sparse * 1e12:.3f} pA and "
          f"{i0_dense * 1e12:.1f} pA for the two published layouts")


def test_criterion_6_dispersive_validation(derived):
    start = time.perf_counter()
    space = qm.HilbertSpec(n_fock=8)
    mp = qm.ModelParams.from_derived(derived, params.ParameterSet())
    # drive at 0.7% of the detuning (inside the <= 1% regime), gradient off
    mp = dataclasses.replace(mp, eta0=0.0, omega_12=0.007 * (mp.delta_a - mp.delta_s))
    omega_sz = mp.dispersive_shifts()[0]
    duration = (math.pi / 4.0) / omega_sz
    report = dynamics.validate_dispersive(space, mp, duration=duration)
    elapsed = time.perf_counter() - start
    assert abs(report.phase_full - report.phase_signal) / report.phase_signal < 0.01
    assert report.leakage < 1e-4
    assert elapsed < 60.0
    print(f"\nACCEPTANCE 6 PASS: phase {report.phase_full:.6f} rad vs formula "
          f"{report.phase_signal:.6f} rad "
          f"({abs(report.phase_full - report.phase_signal) / report.phase_signal:.2%}), "
          f"leakage {report.leakage:.2e}, {elapsed:.2f} s")


@pytest.mark.filterwarnings("ignore:signal_time below")
def test_criterion_7_echo_algebra():
    rng = np.random.default_rng(2718)
    worst = 0.0
    for _ in range(10000):
        freqs = echo.SpinFrequencies(rng.uniform(0.5, 20.0), rng.uniform(0.5, 20.0))
        pulse_rabi = rng.uniform(200.0, 500.0)
        dt = math.pi / (2 * pulse_rabi)
        free_time = rng.uniform(0.5, 8.0)
        sched = echo.EchoSchedule(
            pulse_rabi=pulse_rabi,
            free_time=free_time,
            signal_time=rng.uniform(20 * dt, 0.9 * free_time),
        )
        omega_sz = rng.uniform(0.0, 2 * math.pi) / sched.signal_time
        res = echo.run_echo_analytic(sched, freqs, omega_sz)
        worst = max(worst, abs(res.p_down - echo.fringe_probability(res.theta)))
    assert worst < 1e-12

    freqs = echo.SpinFrequencies(4.0, 6.5)
    thetas = []
    for t_free in np.geomspace(0.8, 8.0, 9):
        sched = echo.EchoSchedule(pulse_rabi=200.0, free_time=t_free, signal_time=0.5)
        thetas.append(echo.run_echo_analytic(sched, freqs, 0.0).theta)
    assert max(thetas) - min(thetas) < 1e-12
    print(f"\nACCEPTANCE 7 PASS: fringe identity to {worst:.2e} over 1e4 draws; "
          f"theta spread {max(thetas) - min(thetas):.2e} across a decade of free times")


def test_criterion_8_noise_suite(derived):
    freqs = echo.SpinFrequencies.from_model(derived.omega_s, derived.eta1, derived.omega_sx1)
    sched = echo.EchoSchedule(
        pulse_rabi=derived.omega_s_esr, free_time=4.0, signal_time=math.pi
    )
    # constant splitting shift: exact window cancellation down to -d_omega*dt
    theta_tilde = echo.dephasing_for_rate(16e3, sched)
    assert theta_tilde == -16e3 * sched.pulse_time
    assert abs(theta_tilde) == pytest.approx(0.014, rel=0.10)
    assert abs(theta_tilde) < math.pi / 10

    noise = echo.NoiseModel(seed=1234)
    small = echo.monte_carlo_echo(sched, freqs, derived.omega_sz, noise, 100)
    large = echo.monte_carlo_echo(sched, freqs, derived.omega_sz, noise, 10000)
    ratio = math.sqrt(small.var_p_down / 100) / math.sqrt(large.var_p_down / 10000)
    assert 7.0 < ratio < 13.0

    again = echo.monte_carlo_echo(sched, freqs, derived.omega_sz, noise, 100)
    assert np.array_equal(small.p_down_shots, again.p_down_shots)
    # order independence: any shot recomputed alone matches bit for bit
    subset = echo.monte_carlo_echo(sched, freqs, derived.omega_sz, noise, 17)
    assert subset.p_down_shots[16] == large.p_down_shots[16]
    print(f"\nACCEPTANCE 8 PASS: theta_tilde {theta_tilde:.5f} rad at 16 krad/s; "
          f"standard-error ratio {ratio:.2f} for n=1e2 vs 1e4; "
          f"repeat runs bit-identical")


def test_criterion_9_unitarity_and_norm(derived):
    freqs = echo.SpinFrequencies.from_model(derived.omega_s, derived.eta1, derived.omega_sx1)
    sched = echo.EchoSchedule(
        pulse_rabi=derived.omega_s_esr, free_time=4.0, signal_time=math.pi
    )
    dt = sched.pulse_time
    factors = [
        echo.r_pulse(sched.pulse_rabi, dt, math.pi / 2),
        echo.r_pulse(sched.pulse_rabi, 2 * dt, math.pi / 2),
        echo.r_pulse(sched.pulse_rabi, dt, -math.pi / 2, detuning=16e3),
        echo.u0(freqs, sched.t1),
        echo.u0(freqs, sched.t2),
        echo.u_signal(derived.omega_sz, sched.signal_time),
        echo._compose(sched, freqs, derived.omega_sz),
    ]
    worst_unitarity = max(qm.unitarity_defect(u) for u in factors)
    assert worst_unitarity < 1e-10

    psi = np.array([1.0, 0.0], complex)
    worst_norm = 0.0
    noise = echo.NoiseModel(seed=77)
    res = echo.monte_carlo_echo(sched, freqs, derived.omega_sz, noise, 200)
    total = res.p_down_shots  # probabilities bounded by normalization
    assert np.all((total >= -1e-8) & (total <= 1.0 + 1e-8))
    for u in factors:
        if u.shape == (2, 2):
            psi2 = u @ psi
            worst_norm = max(worst_norm, abs(np.linalg.norm(psi2) - 1.0))
    assert worst_norm < 1e-8
    print(f"\nACCEPTANCE 9 PASS: worst propagator unitarity defect "
          f"{worst_unitarity:.2e}; norm drift {worst_norm:.2e}")
