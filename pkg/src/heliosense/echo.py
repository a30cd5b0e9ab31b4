"""Spin-echo interferometry with the inserted dispersive signal.

The sequence is pi/2 - signal - free - pi - free - pi/2 on the spin
qubit. Free evolution uses the dressed frequencies (omega_down,
omega_up); the signal window advances the down amplitude by the
two-photon phase. Pulse phases default to (+pi/2, +pi/2, -pi/2), the
pattern for which the composed ground-state probability follows
(1 - cos theta)/2 with theta = (omega_down + omega_up) dt_pulse +
Omega_sz * Delta_t; other patterns shift the fringe by a constant.

Timing bookkeeping folds each pulse window into the adjacent free
interval (T1 = T + dt, T2 = T + 2 dt). An explicit-window composition,
where every pulse carries its own concurrent free evolution, is
available through ``EchoSchedule.window_mode``; it reproduces identical
probabilities because the two compositions differ only by one global
diagonal factor from the final pulse window.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import DEFAULT_CONSTANTS, PhysicalConstants
from .errors import InvalidParameterError
from . import dynamics, quantum_model

DEFAULT_PHASES = (math.pi / 2, math.pi / 2, -math.pi / 2)


@dataclass(frozen=True)
class SpinFrequencies:
    """Dressed spin eigenfrequencies entering the free propagator."""

    omega_down: float
    omega_up: float

    @classmethod
    def from_model(cls, omega_s: float, eta1: float, omega_sx1: float) -> "SpinFrequencies":
        omega_down = 0.5 * (1.0 - 2.0 * eta1) * omega_s
        return cls(omega_down=omega_down, omega_up=omega_down - omega_sx1)

    @property
    def transition(self) -> float:
        return self.omega_down + self.omega_up


@dataclass(frozen=True)
class EchoSchedule:
    """Pulse timing of one echo sequence.

    ``pulse_rabi`` sets the pi/2 duration dt = pi / (2 pulse_rabi); the
    signal of duration ``signal_time`` sits between the first pi/2 and
    the pi pulse and must fit inside the free interval ``free_time``.
    """

    pulse_rabi: float                     # ESR Rabi frequency Omega_s (rad/s)
    free_time: float                      # T (s)
    signal_time: float                    # Delta_t (s)
    phases: tuple = DEFAULT_PHASES        # per-pulse drive phases (rad)
    window_mode: str = "folded"           # "folded" | "explicit"

    def __post_init__(self):
        if self.pulse_rabi <= 0.0:
            raise InvalidParameterError("pulse_rabi must be positive")
        if len(self.phases) != 3:
            raise InvalidParameterError("exactly three pulse phases are required")
        if self.window_mode not in ("folded", "explicit"):
            raise InvalidParameterError(f"unknown window_mode {self.window_mode!r}")
        if self.free_time <= self.signal_time:
            raise InvalidParameterError("free_time must exceed signal_time")
        dt = self.pulse_time
        if self.signal_time != 0.0 and self.signal_time < 10.0 * dt:
            raise InvalidParameterError(
                "signal_time must be zero or at least 10 pulse durations"
            )
        if self.signal_time != 0.0 and self.signal_time < 100.0 * dt:
            warnings.warn(
                "signal_time below 100 pulse durations: pulse-window corrections "
                "are not negligible",
                stacklevel=2,
            )

    @property
    def pulse_time(self) -> float:
        """pi/2-pulse duration (s)."""
        return math.pi / (2.0 * self.pulse_rabi)

    @property
    def t1(self) -> float:
        return self.free_time + self.pulse_time

    @property
    def t2(self) -> float:
        return self.free_time + 2.0 * self.pulse_time

    @property
    def pattern_offset(self) -> float:
        """Constant fringe offset 2 theta_2 - theta_1 - theta_3 - pi of the phase pattern."""
        t1, t2, t3 = self.phases
        return 2.0 * t2 - t1 - t3 - math.pi


def u0(freqs: SpinFrequencies, t: float, extra_down: float = 0.0, extra_up: float = 0.0) -> np.ndarray:
    """Free-evolution propagator diag(e^{i omega_down t}, e^{-i omega_up t}).

    ``extra_down``/``extra_up`` add noise phase integrals of the two branches.
    """
    return np.diag([
        np.exp(1j * (freqs.omega_down * t + extra_down)),
        np.exp(-1j * (freqs.omega_up * t + extra_up)),
    ])


def r_pulse(pulse_rabi: float, t: float, theta: float, detuning: float = 0.0) -> np.ndarray:
    """Pulse propagator, generalized to a detuned drive.

    On resonance this is the standard matrix with cos(Omega t / 2) on the
    diagonal and -i e^{+-i theta} sin(Omega t / 2) off it; with detuning
    delta the rotation proceeds at sqrt(Omega^2 + delta^2) about a tilted
    axis.
    """
    omega_g = math.hypot(pulse_rabi, detuning)
    if omega_g == 0.0:
        return np.eye(2, dtype=complex)
    half = 0.5 * omega_g * t
    c, s = math.cos(half), math.sin(half)
    nx = pulse_rabi * math.cos(theta) / omega_g
    ny = -pulse_rabi * math.sin(theta) / omega_g
    nz = -detuning / omega_g
    return np.array([
        [c - 1j * s * nz, -1j * s * (nx - 1j * ny)],
        [-1j * s * (nx + 1j * ny), c + 1j * s * nz],
    ])


def u_signal(omega_sz: float, delta_t: float) -> np.ndarray:
    """Signal propagator diag(e^{-i Omega_sz Delta_t}, 1)."""
    return np.diag([np.exp(-1j * omega_sz * delta_t), 1.0])


@dataclass
class EchoResult:
    """Outcome of one echo composition or a Monte Carlo ensemble."""

    theta: float                 # fringe phase with p_down = (1 - cos theta)/2
    p_down: float
    baseline_phase: float        # (omega_down + omega_up) * pulse bookkeeping
    signal_phase: float          # Omega_sz * Delta_t
    p_down_shots: np.ndarray | None = field(default=None, repr=False)
    theta_shots: np.ndarray | None = field(default=None, repr=False)
    mean_p_down: float | None = None
    var_p_down: float | None = None
    theta_tilde_mean: float | None = None
    theta_tilde_std: float | None = None


def _compose(schedule: EchoSchedule, freqs: SpinFrequencies, omega_sz: float) -> np.ndarray:
    th1, th2, th3 = schedule.phases
    dt = schedule.pulse_time
    om = schedule.pulse_rabi
    r1 = r_pulse(om, dt, th1)
    r2 = r_pulse(om, 2.0 * dt, th2)
    r3 = r_pulse(om, dt, th3)
    if schedule.window_mode == "folded":
        return (
            r3
            @ u0(freqs, schedule.t2)
            @ r2
            @ u0(freqs, schedule.t1)
            @ u_signal(omega_sz, schedule.signal_time)
            @ r1
        )
    t_rest = schedule.free_time - schedule.signal_time
    return (
        u0(freqs, dt) @ r3
        @ u0(freqs, schedule.free_time)
        @ u0(freqs, 2.0 * dt) @ r2
        @ u0(freqs, t_rest)
        @ u_signal(omega_sz, schedule.signal_time) @ u0(freqs, schedule.signal_time)
        @ u0(freqs, dt) @ r1
    )


def _baseline(schedule: EchoSchedule, freqs: SpinFrequencies) -> float:
    # both window bookkeepings leave the same T2 - T1 = pulse_time gap;
    # the explicit composition differs only by a global diagonal factor
    return freqs.transition * schedule.pulse_time


def run_echo_analytic(
    schedule: EchoSchedule, freqs: SpinFrequencies, omega_sz: float
) -> EchoResult:
    """Compose the sequence exactly from its matrix factors."""
    u = _compose(schedule, freqs, omega_sz)
    p_down = float(abs(u[0, 0]) ** 2)
    baseline = _baseline(schedule, freqs)
    signal = omega_sz * schedule.signal_time
    theta = baseline + signal + schedule.pattern_offset
    return EchoResult(
        theta=theta,
        p_down=p_down,
        baseline_phase=baseline,
        signal_phase=signal,
    )


def fringe_probability(theta: float) -> float:
    """Closed-form ground-state probability (1 - cos theta)/2."""
    return 0.5 * (1.0 - math.cos(theta))


def run_echo_numeric(
    schedule: EchoSchedule,
    freqs: SpinFrequencies,
    omega_sz: float,
    mode: str = "effective",
    spec: quantum_model.HilbertSpec | None = None,
    mp: quantum_model.ModelParams | None = None,
    pulse_steps: int = 400,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> EchoResult:
    """Run the sequence with numerically propagated pieces.

    Pulses are stepped under the ESR Hamiltonian. The signal window uses
    the reduced dispersive form in mode "effective"; in mode "full" it is
    taken from an exact propagation of the four-term interaction-picture
    Hamiltonian on the composite space, with the dressed-frequency part
    already carried by the free propagator divided out.
    """
    dt = schedule.pulse_time
    om = schedule.pulse_rabi

    def pulse(duration, theta):
        h = quantum_model.esr_spin_matrix(om, theta, consts)
        traj = dynamics.propagate(
            h, np.array([1.0, 0.0], complex), duration, duration / pulse_steps, consts=consts
        )
        # constant hermitian H: build the unitary from two propagated columns
        traj2 = dynamics.propagate(
            h, np.array([0.0, 1.0], complex), duration, duration / pulse_steps, consts=consts
        )
        return np.column_stack([traj.states[-1], traj2.states[-1]])

    if mode == "effective":
        omega_sx1 = freqs.omega_down - freqs.omega_up
        h24 = np.diag([consts.hbar * omega_sz, -consts.hbar * omega_sx1]).astype(complex)
        u24 = dynamics.propagate(
            h24,
            np.array([1.0, 0.0], complex),
            schedule.signal_time,
            schedule.signal_time,
            consts=consts,
        ).states[-1][0] if schedule.signal_time > 0 else 1.0
        # diagonal model: the up-branch factor e^{+i omega_sx1 dt} is already
        # carried by omega_up inside u0, so only the down factor remains
        m_signal = np.diag([u24, 1.0]).astype(complex)
    elif mode == "full":
        if spec is None or mp is None:
            raise InvalidParameterError("mode='full' needs the composite model")
        import dataclasses

        psi_dn = spec.basis_state(0, 0, 0)
        psi_up = spec.basis_state(0, 1, 0)

        def window_amplitudes(model):
            d_vec, w = quantum_model.rotating_frame(spec, model)
            s_dn = dynamics.rotating_frame_propagate(
                d_vec, w, psi_dn, [schedule.signal_time], consts)[0]
            s_up = dynamics.rotating_frame_propagate(
                d_vec, w, psi_up, [schedule.signal_time], consts)[0]
            return s_dn[spec.index(0, 0, 0)], s_up[spec.index(0, 1, 0)]

        f_dn, f_up = window_amplitudes(mp)
        # calibrate against the undriven window: the dressed free phases
        # (including orders beyond the closed-form shifts) already live in
        # the u0 bookkeeping and must not be double counted
        r_dn, r_up = window_amplitudes(dataclasses.replace(mp, omega_12=0.0))
        m_signal = np.diag([f_dn / r_dn, f_up / r_up])
    else:
        raise InvalidParameterError(f"unknown numeric mode {mode!r}")

    th1, th2, th3 = schedule.phases
    if schedule.window_mode == "folded":
        u = (
            pulse(dt, th3)
            @ u0(freqs, schedule.t2)
            @ pulse(2.0 * dt, th2)
            @ u0(freqs, schedule.t1)
            @ m_signal
            @ pulse(dt, th1)
        )
    else:
        t_rest = schedule.free_time - schedule.signal_time
        u = (
            u0(freqs, dt) @ pulse(dt, th3)
            @ u0(freqs, schedule.free_time)
            @ u0(freqs, 2.0 * dt) @ pulse(2.0 * dt, th2)
            @ u0(freqs, t_rest)
            @ m_signal @ u0(freqs, schedule.signal_time)
            @ u0(freqs, dt) @ pulse(dt, th1)
        )
    p_down = float(abs(u[0, 0]) ** 2)
    baseline = _baseline(schedule, freqs)
    signal = omega_sz * schedule.signal_time
    return EchoResult(
        theta=baseline + signal + schedule.pattern_offset,
        p_down=p_down,
        baseline_phase=baseline,
        signal_phase=signal,
    )


@dataclass(frozen=True)
class NoiseModel:
    """Fractional frequency noise of the bias current and the film thickness.

    Both enter the dressed frequencies as omega_down * (dI/I + dh/h).
    "quasi-static" draws one value per shot; "ou" evolves
    Ornstein-Uhlenbeck processes with the given correlation times across
    the sequence windows.
    """

    kind: str = "quasi-static"           # "quasi-static" | "ou"
    sigma_current: float = 0.5e-6        # rms dI/I
    sigma_ripplon: float = 4.0e-6        # rms dh/h
    tau_current: float = 1e-3            # OU correlation times (s)
    tau_ripplon: float = 1e-4
    seed: int = 2024
    substeps: int = 64                   # integration substeps per free window (OU)

    def __post_init__(self):
        if self.kind not in ("quasi-static", "ou"):
            raise InvalidParameterError(f"unknown noise kind {self.kind!r}")
        if self.sigma_current < 0.0 or self.sigma_ripplon < 0.0:
            raise InvalidParameterError("noise sigmas must be non-negative")
        if self.kind == "ou" and (self.tau_current <= 0.0 or self.tau_ripplon <= 0.0):
            raise InvalidParameterError("OU correlation times must be positive")
        if self.substeps < 2:
            raise InvalidParameterError("substeps must be at least 2")

    def shot_rng(self, shot: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, shot])


def _shot_fraction_windows(noise: NoiseModel, rng, durations):
    """Per-window (integral, left-edge value) of the fractional noise r(t).

    Windows are consecutive in time and aligned with ``durations``. For
    quasi-static noise r is one constant over the whole shot; for OU
    noise both processes are stepped exactly across the windows and the
    integrals use the trapezoid rule on the substep grid.
    """
    if noise.kind == "quasi-static":
        r = rng.normal(0.0, noise.sigma_current) + rng.normal(0.0, noise.sigma_ripplon)
        return [r * d for d in durations], [r] * len(durations)
    n = noise.substeps
    combined = [np.zeros(n + 1) for _ in durations]
    for sigma, tau in (
        (noise.sigma_current, noise.tau_current),
        (noise.sigma_ripplon, noise.tau_ripplon),
    ):
        x = rng.normal(0.0, sigma)
        for j, d in enumerate(durations):
            seg = np.empty(n + 1)
            seg[0] = x
            decay = math.exp(-(d / n) / tau)
            kick = sigma * math.sqrt(max(0.0, 1.0 - decay * decay))
            draws = rng.normal(0.0, 1.0, n)
            for i in range(n):
                seg[i + 1] = seg[i] * decay + kick * draws[i]
            combined[j] += seg
            x = seg[-1]
    integrals = [
        float(np.trapezoid(combined[j], dx=durations[j] / n)) for j in range(len(durations))
    ]
    edges = [float(combined[j][0]) for j in range(len(durations))]
    return integrals, edges


def monte_carlo_echo(
    schedule: EchoSchedule,
    freqs: SpinFrequencies,
    omega_sz: float,
    noise: NoiseModel,
    n_shots: int,
    perturb_pulses: bool = True,
) -> EchoResult:
    """Echo ensemble under sampled frequency noise.

    Per shot the fractional noise r(t) shifts both branch frequencies by
    omega_down * r; free windows integrate the noisy phase and pulses see
    the instantaneous splitting shift 2 omega_down * r as a drive
    detuning. The per-shot random stream depends only on (seed, shot), so
    results are independent of execution order.
    """
    if n_shots < 1:
        raise InvalidParameterError("n_shots must be at least 1")
    dt = schedule.pulse_time
    om = schedule.pulse_rabi
    th1, th2, th3 = schedule.phases
    p_shots = np.empty(n_shots)
    t_shots = np.empty(n_shots)
    wd = freqs.omega_down
    for shot in range(n_shots):
        rng = noise.shot_rng(shot)
        # windows: pulse1 | free T1 | pulse2 | free T2 | pulse3
        durations = (dt, schedule.t1, 2.0 * dt, schedule.t2, dt)
        integrals, edges = _shot_fraction_windows(noise, rng, durations)
        det1, det2, det3 = (2.0 * wd * edges[0], 2.0 * wd * edges[2], 2.0 * wd * edges[4])
        if not perturb_pulses:
            det1 = det2 = det3 = 0.0
        ph1 = wd * integrals[1]
        ph2 = wd * integrals[3]
        u = (
            r_pulse(om, dt, th3, det3)
            @ u0(freqs, schedule.t2, extra_down=ph2, extra_up=ph2)
            @ r_pulse(om, 2.0 * dt, th2, det2)
            @ u0(freqs, schedule.t1, extra_down=ph1, extra_up=ph1)
            @ u_signal(omega_sz, schedule.signal_time)
            @ r_pulse(om, dt, th1, det1)
        )
        p = float(abs(u[0, 0]) ** 2)
        p_shots[shot] = p
        t_shots[shot] = math.acos(max(-1.0, min(1.0, 1.0 - 2.0 * p)))
    clean = run_echo_analytic(schedule, freqs, omega_sz)
    return EchoResult(
        theta=clean.theta,
        p_down=clean.p_down,
        baseline_phase=clean.baseline_phase,
        signal_phase=clean.signal_phase,
        p_down_shots=p_shots,
        theta_shots=t_shots,
        mean_p_down=float(p_shots.mean()),
        var_p_down=float(p_shots.var()),
    )


@dataclass
class ThetaTildeStats:
    mean: float
    std: float
    max_abs: float
    values: np.ndarray = field(repr=False, default=None)


def estimate_dephasing(
    noise: NoiseModel,
    schedule: EchoSchedule,
    freqs: SpinFrequencies,
    n_shots: int = 1000,
) -> ThetaTildeStats:
    """Echo-weighted phase integral per noise realization.

    theta_tilde = int_0^T1 domega_s dt - int_T1^{T1+T2} domega_s dt with
    the splitting shift domega_s(t) = 2 omega_down r(t); for static noise
    the windows cancel down to -domega_s * pulse_time. The quasi-static
    path is evaluated in closed form (no discretization error).
    """
    t1, t2 = schedule.t1, schedule.t2
    scale = 2.0 * freqs.omega_down
    values = np.empty(n_shots)
    for shot in range(n_shots):
        rng = noise.shot_rng(shot)
        if noise.kind == "quasi-static":
            r = rng.normal(0.0, noise.sigma_current) + rng.normal(0.0, noise.sigma_ripplon)
            # t1 - t2 = -pulse_time identically; avoid the cancellation
            values[shot] = -scale * r * schedule.pulse_time
        else:
            integrals, _ = _shot_fraction_windows(noise, rng, (t1, t2))
            values[shot] = scale * (integrals[0] - integrals[1])
    return ThetaTildeStats(
        mean=float(values.mean()),
        std=float(values.std()),
        max_abs=float(np.abs(values).max()),
        values=values,
    )


def dephasing_for_rate(delta_omega_s: float, schedule: EchoSchedule) -> float:
    """Closed-form theta_tilde for a constant splitting shift delta_omega_s.

    The windows cancel down to delta_omega_s (T1 - T2) = -delta_omega_s
    times the pulse duration.
    """
    return -delta_omega_s * schedule.pulse_time


def ou_echo_phase_variance(
    sigma_omega: float, tau: float, t1: float, t2: float, n_grid: int = 2000
) -> float:
    """Variance of the two-window phase integral for an OU frequency process.

    Quadrature of the exact covariance sigma^2 e^{-|t-t'|/tau} against the
    +-1 echo weighting; serves as the independent check of the Monte
    Carlo in the short-correlation-time regime.
    """
    total = t1 + t2
    ts = np.linspace(0.0, total, n_grid)
    w = np.where(ts < t1, 1.0, -1.0)
    cov = sigma_omega**2 * np.exp(-np.abs(ts[:, None] - ts[None, :]) / tau)
    dt = total / (n_grid - 1)
    return float(w @ cov @ w * dt * dt)
