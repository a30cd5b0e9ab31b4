"""Command-line front end.

Subcommands: derive-params, solve-hydrogen, solve-trap, simulate-echo,
sensitivity. Exit codes: 0 success, 1 physics or consistency failure,
2 configuration error. Output files carry units in their column headers
and contain no timestamps, so fixed-seed reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, parse_config
from .constants import TWO_PI
from .errors import ConfigError, HeliosenseError
from . import echo, hydrogen1d, params, quantum_model, sensing, trap_fields

SCHEMA_VERSION = 1


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict):
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return payload


def _out_dir(args, cfg: RunConfig) -> Path:
    out = Path(args.out if args.out is not None else cfg.output.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _derived_chain(cfg: RunConfig):
    p = cfg.parameters
    spec = hydrogen1d.solve_spectrum(
        hydrogen1d.default_potential(
            p.e_z, z_max_rb=cfg.hydrogen.z_max_rb, n_points=cfg.hydrogen.n_points
        ),
        n_levels=max(2, cfg.hydrogen.n_levels),
    )
    dipoles = hydrogen1d.dipole_elements(spec)
    return params.derive_parameters(p, dipoles=dipoles, omega_a=spec.omega_a())


def cmd_derive_params(args, cfg: RunConfig) -> int:
    p = cfg.parameters
    if args.from_trap:
        geom = trap_fields.cross_cell(
            l=p.l, d=p.d, h=p.h,
            gap=cfg.trap.gap_um * trap_fields.UM,
            insulator=cfg.trap.insulator_um * trap_fields.UM,
            wire_plane=cfg.trap.wire_plane,
        )
        fit, _ = trap_fields.trap_fit(
            geom, cfg.trap.solver_options(),
            radius=cfg.trap.fit_radius_um * trap_fields.UM,
            z_half=cfg.trap.fit_zhalf_um * trap_fields.UM,
        )
        p = p.with_trap_fit(fit)
        cfg = dataclasses.replace(cfg, parameters=p)
    dp = _derived_chain(cfg)
    rows = params.provenance_rows(p, dp)
    flags = params.regime_flags(p, dp)
    out = _out_dir(args, cfg)
    _write_csv(
        out / "params_provenance.csv",
        ["quantity", "value", "unit", "formula", "note"],
        [(r["quantity"], repr(r["value"]), r["unit"], r["formula"], r["note"]) for r in rows],
    )
    payload = _write_json(
        out / "params_provenance.json",
        {
            "provenance": rows,
            "regime_flags": flags,
        },
    )
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        width = max(len(r["quantity"]) for r in rows)
        for r in rows:
            print(f"{r['quantity']:<{width}}  {r['value']:< 16.8g} {r['unit']:<7} {r['formula']}")
        for name, check in flags.items():
            state = "ok" if check["ok"] else "VIOLATED"
            print(f"flag {name}: {state} (value {check['value']:.4g}, threshold {check['threshold']:.4g})")
    if not all(check["ok"] for check in flags.values()):
        print("regime flags violated", file=sys.stderr)
        return 1
    return 0


def cmd_solve_hydrogen(args, cfg: RunConfig) -> int:
    hc = cfg.hydrogen
    out = _out_dir(args, cfg)
    fields = np.linspace(hc.scan_lo_V_per_m, hc.scan_hi_V_per_m, hc.scan_points)
    scan = hydrogen1d.stark_scan(fields, z_max_rb=hc.z_max_rb, n_points=hc.n_points)
    _write_csv(
        out / "hydrogen_scan.csv",
        ["E_z[V/m]", "omega_a[rad/s]", "z11[m]", "z12[m]", "z22[m]"],
        [(r.pressing_field, r.omega_a, r.z11, r.z12, r.z22) for r in scan],
    )
    zero = scan[0] if scan[0].pressing_field == 0.0 else hydrogen1d.stark_scan([0.0])[0]
    target = TWO_PI * 160e9
    found = hydrogen1d.find_field_for_transition(target, n_points=hc.n_points)
    op = hydrogen1d.stark_scan([cfg.parameters.e_z], z_max_rb=hc.z_max_rb, n_points=hc.n_points)[0]
    rb = hydrogen1d.bohr_radius()
    summary = {
        "zero_field": {
            "omega_a_rad_per_s": zero.omega_a,
            "transition_GHz": zero.omega_a / TWO_PI / 1e9,
            "z11_over_rb": zero.z11 / rb,
            "z12_over_rb": zero.z12 / rb,
            "z22_over_rb": zero.z22 / rb,
        },
        "operating_field": {
            "E_z_V_per_m": op.pressing_field,
            "omega_a_rad_per_s": op.omega_a,
            "transition_GHz": op.omega_a / TWO_PI / 1e9,
            "z11_over_rb": op.z11 / rb,
            "z12_over_rb": op.z12 / rb,
            "z22_minus_z11_over_rb": (op.z22 - op.z11) / rb,
        },
        "field_for_160GHz": {
            "E_z_V_per_m": found,
            "E_z_V_per_cm": found / 100.0,
            "nearest_quoted_reading_V_per_cm": 56.9 if abs(found / 100 - 56.9) < abs(found / 100 - 569) else 569.0,
        },
        "bohr_radius_m": rb,
    }
    payload = _write_json(out / "hydrogen_summary.json", summary)
    if args.dump_wavefunctions:
        spec = hydrogen1d.solve_spectrum(
            hydrogen1d.default_potential(cfg.parameters.e_z, z_max_rb=hc.z_max_rb,
                                         n_points=hc.n_points),
            n_levels=max(2, hc.n_levels),
        )
        for n in range(spec.n_levels):
            _write_csv(
                out / f"wavefunction_{n + 1}.csv",
                ["z[m]", "psi[m^-1/2]"],
                zip(spec.grid, spec.wavefunctions[n]),
            )
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"zero-field transition: {summary['zero_field']['transition_GHz']:.2f} GHz")
        print(f"operating-field transition: {summary['operating_field']['transition_GHz']:.2f} GHz "
              f"at E_z = {op.pressing_field:.4g} V/m")
        print(f"160 GHz reached at E_z = {found:.4g} V/m = {found / 100:.1f} V/cm")
    return 0


def cmd_solve_trap(args, cfg: RunConfig) -> int:
    p = cfg.parameters
    tc = cfg.trap
    out = _out_dir(args, cfg)
    geom = trap_fields.cross_cell(
        l=p.l, d=p.d, h=p.h,
        gap=tc.gap_um * trap_fields.UM,
        insulator=tc.insulator_um * trap_fields.UM,
        wire_plane=tc.wire_plane,
    )
    fit, fmap = trap_fields.trap_fit(
        geom, tc.solver_options(),
        radius=tc.fit_radius_um * trap_fields.UM,
        z_half=tc.fit_zhalf_um * trap_fields.UM,
    )
    confining = fit.q_xx > 0.0 and fit.q_yy > 0.0
    omega_x = (
        params.compute_lateral_frequency(fit.q_xx * p.v_bias) if confining else None
    )
    summary = {
        "convention": fit.convention,
        "V0_V": fit.v0,
        "E_z_V_per_m_per_V": fit.e_z,
        "Q_xx_V_per_m2_per_V": fit.q_xx,
        "Q_yy_V_per_m2_per_V": fit.q_yy,
        "Q_zz_V_per_m2_per_V": fit.q_zz,
        "cross_terms_V_per_m2_per_V": {"Q_xy": fit.q_xy, "Q_xz": fit.q_xz, "Q_yz": fit.q_yz},
        "trace_ratio": fit.trace_ratio,
        "cross_term_ratio": fit.cross_term_ratio,
        "fit_residual_rms_V": fit.residual_rms,
        "fit_samples": fit.n_samples,
        "sor_sweeps": fmap.sweeps,
        "omega_x_rad_per_s_at_bias": omega_x,
        "v_bias_V": p.v_bias,
    }
    payload = _write_json(out / "trap_fit.json", summary)
    _write_csv(
        out / "trap_fit.csv",
        ["coefficient", "value", "unit"],
        [
            ("V0", fit.v0, "V"),
            ("E_z", fit.e_z, "V/m/V"),
            ("Q_xx", fit.q_xx, "V/m^2/V"),
            ("Q_yy", fit.q_yy, "V/m^2/V"),
            ("Q_zz", fit.q_zz, "V/m^2/V"),
            ("Q_xy", fit.q_xy, "V/m^2/V"),
            ("Q_xz", fit.q_xz, "V/m^2/V"),
            ("Q_yz", fit.q_yz, "V/m^2/V"),
        ],
    )
    if args.dump_field:
        full = fmap.mirrored_full()
        rows = []
        for i, xv in enumerate(full.x):
            for j, yv in enumerate(full.y):
                for k, zv in enumerate(full.z):
                    rows.append((xv, yv, zv, full.phi[i, j, k]))
        _write_csv(out / "trap_field.csv", ["x[m]", "y[m]", "z[m]", "phi[V]"], rows)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"E_z = {fit.e_z:.4g} V/m per volt")
        print(f"Q_xx = {fit.q_xx:.4g}, Q_yy = {fit.q_yy:.4g}, Q_zz = {fit.q_zz:.4g} V/m^2 per volt")
        print(f"trace ratio |Qxx+Qyy+Qzz|/|Qzz| = {fit.trace_ratio:.3f}")
        if omega_x is not None:
            print(f"omega_x at {p.v_bias} V bias = {omega_x:.4g} rad/s")
    if not confining or fit.trace_ratio > 0.05 or fit.cross_term_ratio > 1e-3:
        print("quadrupole fit failed its confinement/symmetry/trace checks", file=sys.stderr)
        return 1
    return 0


def cmd_simulate_echo(args, cfg: RunConfig) -> int:
    ec = cfg.echo
    out = _out_dir(args, cfg)
    dp = _derived_chain(cfg)
    freqs = echo.SpinFrequencies.from_model(dp.omega_s, dp.eta1, dp.omega_sx1)
    schedule = echo.EchoSchedule(
        pulse_rabi=dp.omega_s_esr,
        free_time=ec.free_time_s,
        signal_time=ec.signal_time_s,
        phases=(ec.phase_1_rad, ec.phase_2_rad, ec.phase_3_rad),
        window_mode=ec.window_mode,
    )
    analytic = echo.run_echo_analytic(schedule, freqs, dp.omega_sz)
    if ec.numeric_mode == "full":
        space = quantum_model.HilbertSpec()
        mp = quantum_model.ModelParams.from_derived(dp, cfg.parameters)
        numeric = echo.run_echo_numeric(
            schedule, freqs, dp.omega_sz, mode="full", spec=space, mp=mp
        )
    else:
        numeric = echo.run_echo_numeric(schedule, freqs, dp.omega_sz, mode=ec.numeric_mode)
    closed = echo.fringe_probability(analytic.theta)
    if ec.numeric_mode == "full":
        # the composite propagation carries the real up-branch drive shift;
        # gate on the extracted phase against 1% of the signal phase
        theta_a = math.acos(max(-1.0, min(1.0, 1.0 - 2.0 * analytic.p_down)))
        theta_n = math.acos(max(-1.0, min(1.0, 1.0 - 2.0 * numeric.p_down)))
        budget = max(0.01 * abs(analytic.signal_phase), 1e-6)
        consistency = max(abs(analytic.p_down - closed), abs(theta_a - theta_n) / budget * 1e-6)
    else:
        consistency = max(
            abs(analytic.p_down - closed), abs(numeric.p_down - analytic.p_down)
        )

    fringe_rows = []
    for delta_t in np.linspace(0.0, ec.signal_time_s, ec.fringe_points):
        sched = dataclasses.replace(schedule, signal_time=float(delta_t))
        res = echo.run_echo_analytic(sched, freqs, dp.omega_sz)
        fringe_rows.append((delta_t, res.theta, res.p_down))
    _write_csv(
        out / "echo_fringe.csv",
        ["delta_t[s]", "theta[rad]", "p_down[1]"],
        fringe_rows,
    )

    noise = cfg.noise
    if args.seed is not None:
        noise = dataclasses.replace(noise, seed=args.seed)
    n_shots = ec.shots if args.shots is None else args.shots
    summary = {
        "pulse_time_s": schedule.pulse_time,
        "omega_down_rad_per_s": freqs.omega_down,
        "omega_up_rad_per_s": freqs.omega_up,
        "omega_sz_rad_per_s": dp.omega_sz,
        "theta_rad": analytic.theta,
        "baseline_phase_rad": analytic.baseline_phase,
        "signal_phase_rad": analytic.signal_phase,
        "p_down_analytic": analytic.p_down,
        "p_down_numeric": numeric.p_down,
        "consistency_defect": consistency,
        "shots": n_shots,
        "noise": dataclasses.asdict(noise),
    }
    if n_shots > 0:
        mc = echo.monte_carlo_echo(schedule, freqs, dp.omega_sz, noise, n_shots)
        dephasing = echo.estimate_dephasing(noise, schedule, freqs, n_shots)
        _write_csv(
            out / "echo_shots.csv",
            ["shot", "theta[rad]", "p_down[1]"],
            [(i, mc.theta_shots[i], mc.p_down_shots[i]) for i in range(n_shots)],
        )
        summary.update(
            mean_p_down=mc.mean_p_down,
            var_p_down=mc.var_p_down,
            theta_tilde_mean_rad=dephasing.mean,
            theta_tilde_std_rad=dephasing.std,
        )
    payload = _write_json(out / "echo_summary.json", summary)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"theta = {analytic.theta:.6g} rad, p_down = {analytic.p_down:.6g}")
        print(f"numeric path p_down = {numeric.p_down:.6g} (defect {consistency:.2e})")
        if n_shots > 0:
            print(f"Monte Carlo over {n_shots} shots: mean p_down = {summary['mean_p_down']:.6g}, "
                  f"var = {summary['var_p_down']:.3g}")
    if consistency > 1e-6:
        print("echo internal consistency check failed", file=sys.stderr)
        return 1
    return 0


def cmd_sensitivity(args, cfg: RunConfig) -> int:
    sc = cfg.sensitivity
    out = _out_dir(args, cfg)
    spec = hydrogen1d.solve_spectrum(
        hydrogen1d.default_potential(sc.z12_field_V_per_m), n_levels=2
    )
    z12 = abs(hydrogen1d.dipole_elements(spec).z12)  # sign is a basis convention
    dp = _derived_chain(cfg)
    detuning = dp.delta_a - dp.delta_s
    theta_min = math.pi if args.preset == "showcase" else sc.theta_min_rad
    if args.preset == "showcase":
        delta_ts = [math.pi]
    else:
        delta_ts = np.linspace(sc.delta_t_lo_s, sc.delta_t_hi_s, sc.n_points)
    curve = sensing.sensitivity_curve(delta_ts, theta_min, detuning, z12)
    _write_csv(
        out / "sensitivity_curve.csv",
        ["delta_t[s]", "omega_sz[rad/s]", "omega_12[rad/s]", "E_w[V/m]", "P_w[W/m^2]"],
        [(pt.delta_t, pt.omega_sz, pt.omega_12, pt.e_w, pt.p_w) for pt in curve],
    )
    showcase = sensing.showcase_point(detuning, z12)
    summary = {
        "theta_min_rad": theta_min,
        "detuning_rad_per_s": detuning,
        "z12_m": z12,
        "z12_field_V_per_m": sc.z12_field_V_per_m,
        "showcase": {
            "delta_t_s": showcase.delta_t,
            "omega_12_rad_per_s": showcase.omega_12,
            "E_w_V_per_m": showcase.e_w,
            "E_w_nV_per_cm": showcase.e_w * 1e9 / 100.0,
            "P_w_W_per_m2": showcase.p_w,
            "P_w_W_per_cm2": showcase.p_w / 1e4,
        },
        "benchmarks": list(sensing.DEFAULT_BENCHMARKS),
        "curve_monotonic": all(
            curve[i].e_w >= curve[i + 1].e_w for i in range(len(curve) - 1)
        ),
    }
    payload = _write_json(out / "sensitivity_summary.json", summary)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"z12 = {z12:.4g} m (solved at {sc.z12_field_V_per_m:.4g} V/m)")
        print(f"showcase: E_w = {summary['showcase']['E_w_nV_per_cm']:.1f} nV/cm, "
              f"P_w = {summary['showcase']['P_w_W_per_cm2']:.3g} W/cm^2")
        for bench in sensing.DEFAULT_BENCHMARKS:
            print(f"benchmark {bench['name']}: {bench.get('note')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="INI run configuration")
    common.add_argument("--json", action="store_true", help="print the JSON summary to stdout")
    common.add_argument("--seed", type=int, default=None, help="override the noise seed")
    common.add_argument("--shots", type=int, default=None, help="override the Monte Carlo shot count")
    common.add_argument("--out", default=None, help="output directory")

    parser = argparse.ArgumentParser(
        prog="heliosense",
        description="Trapped-electron spin-echo mm-wave sensing simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_derive = sub.add_parser("derive-params", parents=[common],
                              help="derived-parameter provenance table")
    p_derive.add_argument("--from-trap", action="store_true",
                          help="replace trap coefficients with a fresh field solve")
    p_derive.set_defaults(func=cmd_derive_params)

    p_hyd = sub.add_parser("solve-hydrogen", parents=[common],
                           help="vertical spectrum and Stark scan")
    p_hyd.add_argument("--dump-wavefunctions", action="store_true")
    p_hyd.set_defaults(func=cmd_solve_hydrogen)

    p_trap = sub.add_parser("solve-trap", parents=[common],
                            help="cell electrostatics and quadrupole fit")
    p_trap.add_argument("--dump-field", action="store_true")
    p_trap.set_defaults(func=cmd_solve_trap)

    p_echo = sub.add_parser("simulate-echo", parents=[common],
                            help="echo fringe, numeric check, Monte Carlo")
    p_echo.set_defaults(func=cmd_simulate_echo)

    p_sens = sub.add_parser("sensitivity", parents=[common],
                            help="minimal detectable field versus insertion time")
    p_sens.add_argument("--preset", choices=["showcase"], default=None)
    p_sens.set_defaults(func=cmd_sensitivity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HeliosenseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
