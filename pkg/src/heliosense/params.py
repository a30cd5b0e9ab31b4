"""Single source of truth for inputs and closed-form derived quantities.

Every derived number used elsewhere in the package comes out of this
module as a pure function of (PhysicalConstants, ParameterSet) plus the
dipole matrix elements computed by :mod:`heliosense.hydrogen1d`. All
frequencies are angular (rad/s); the provenance report labels each row
with its unit and defining formula.

Trap coefficients follow the per-volt convention: the stored E_z and
Q_jj describe the fit at 1 V bias and are multiplied by ``v_bias`` when
the operating values are needed. Dipole elements are never hard-coded;
defaults are produced by the vertical-motion solver at the configured
pressing field.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from .constants import DEFAULT_CONSTANTS, TWO_PI, PhysicalConstants
from .errors import (
    ConfinementError,
    ForbiddenTransitionError,
    InvalidParameterError,
    ResonantDriveError,
)
from . import hydrogen1d

ETA_WARN_THRESHOLD = 0.1
DISPERSIVE_RATIO_LIMIT = 0.1


@dataclass(frozen=True)
class ParameterSet:
    """Physical inputs of a run. Lengths in m, fields per-volt, currents in A."""

    i_dc: float = 0.5                 # bias current (A)
    h: float = 5e-6                   # helium film thickness (m)
    l: float = 100e-6                 # lateral electrode length (m)
    d: float = 1e-6                   # wire cross-section edge (m)
    v_bias: float = 0.1               # trap voltage (V)
    temperature: float = 0.010        # (K)
    e_z_per_volt: float = 5.69e4      # pressing field per volt of bias (V/m/V)
    q_xx_per_volt: float = 4.04e9     # quadrupole coefficients per volt (V/m^2/V)
    q_yy_per_volt: float = 4.16e9
    q_zz_per_volt: float = -8.53e9
    omega_12: float = 100.0           # drive Rabi frequency (rad/s)
    delta_a: float | None = None      # drive-atom detuning (rad/s); None -> use offset
    delta_a_offset: float = 1.0e4     # Delta_a - Delta_s when delta_a is None (rad/s)
    i_0_esr: float = 5e-3             # ESR pulse current amplitude (A)
    omega_m: float = TWO_PI * 1e5     # drive modulation angular frequency (rad/s)
    n_s: float = 2e8                  # areal electron density (1/m^2)
    plate_d: float = 1e-4             # detection-plate height (m)
    plate_s: float = 4e-4             # detection-plate area (m^2)

    def __post_init__(self):
        if self.h <= 0.0:
            raise InvalidParameterError("film thickness h must be positive")
        for name in ("l", "d", "plate_d", "plate_s"):
            if getattr(self, name) <= 0.0:
                raise InvalidParameterError(f"{name} must be positive")
        if self.l <= self.h:
            raise InvalidParameterError("electrode length l must exceed film thickness h")
        if self.i_dc < 0.0:
            raise InvalidParameterError("i_dc must be non-negative")
        if self.temperature <= 0.0:
            raise InvalidParameterError("temperature must be positive")

    @property
    def e_z(self) -> float:
        """Operating pressing field (V/m)."""
        return self.e_z_per_volt * self.v_bias

    @property
    def q_xx(self) -> float:
        return self.q_xx_per_volt * self.v_bias

    @property
    def q_yy(self) -> float:
        return self.q_yy_per_volt * self.v_bias

    @property
    def q_zz(self) -> float:
        return self.q_zz_per_volt * self.v_bias

    def with_trap_fit(self, fit) -> "ParameterSet":
        """Replace the per-volt trap coefficients with a quadrupole-fit result.

        ``fit`` must use the electron (trap) sign convention and a 1 V solve.
        """
        return replace(
            self,
            e_z_per_volt=fit.e_z,
            q_xx_per_volt=fit.q_xx,
            q_yy_per_volt=fit.q_yy,
            q_zz_per_volt=fit.q_zz,
        )


@dataclass(frozen=True)
class DerivedParameters:
    """Closed-form quantities derived from a ParameterSet plus dipole elements."""

    b0: float            # peak wire field (T)
    omega_s: float       # spin splitting (rad/s)
    omega_x: float       # lateral trap frequencies (rad/s)
    omega_y: float
    x0: float            # oscillator length (m)
    eta0: float          # x0 / (2h)
    eta1: float          # z11 / (2h)
    eta2: float          # z22 / (2h)
    delta_s: float       # spin-dependent Stark shift (rad/s)
    delta_a: float       # drive-atom detuning (rad/s)
    delta_x: float       # omega_x - omega_s (rad/s)
    omega_sz: float      # two-photon shift (rad/s)
    omega_sx1: float     # dispersive spin-oscillator shifts (rad/s)
    omega_sx2: float
    omega_s_esr: float   # ESR Rabi frequency (rad/s)
    b_tilde_z: float     # ESR field amplitude (T)
    z11: float           # dipole elements at the operating field (m)
    z12: float
    z22: float
    r_b: float           # Bohr-radius scale (m)
    omega_a: float = math.nan  # lowest vertical transition at the operating field (rad/s)


def compute_b0(i_dc: float, h: float, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Peak field mu0 i_dc / (2 pi h) of the bias wire at the surface (T)."""
    if h <= 0.0:
        raise InvalidParameterError("film thickness h must be positive")
    if i_dc < 0.0:
        raise InvalidParameterError("i_dc must be non-negative")
    return consts.mu0 * i_dc / (TWO_PI * h)


def compute_spin_splitting(b0: float, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Zeeman splitting 2 u_b B0 / hbar (rad/s)."""
    if b0 < 0.0:
        raise InvalidParameterError("b0 must be non-negative")
    return 2.0 * consts.u_b * b0 / consts.hbar


def compute_lateral_frequency(q_jj: float, consts: PhysicalConstants = DEFAULT_CONSTANTS, axis: str = "x") -> float:
    """Harmonic frequency sqrt(2 e Q_jj / m_e) of one lateral axis (rad/s)."""
    if q_jj <= 0.0:
        raise ConfinementError(f"Q_{axis}{axis} <= 0: not a trap along axis {axis}")
    return math.sqrt(2.0 * consts.e * q_jj / consts.m_e)


def compute_lateral_frequencies(p: ParameterSet, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> tuple[float, float]:
    """(omega_x, omega_y) from the bias-scaled quadrupole coefficients."""
    return (
        compute_lateral_frequency(p.q_xx, consts, "x"),
        compute_lateral_frequency(p.q_yy, consts, "y"),
    )


def oscillator_length(omega: float, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Zero-point length sqrt(hbar / (2 m_e omega)) (m)."""
    if omega <= 0.0:
        raise InvalidParameterError("oscillator frequency must be positive")
    return math.sqrt(consts.hbar / (2.0 * consts.m_e * omega))


def compute_eta_parameters(x0: float, z11: float, z22: float, h: float) -> tuple[float, float, float]:
    """Dimensionless gradient couplings (x0, z11, z22) / (2h)."""
    if h <= 0.0:
        raise InvalidParameterError("film thickness h must be positive")
    etas = (x0 / (2.0 * h), z11 / (2.0 * h), z22 / (2.0 * h))
    if any(abs(v) > ETA_WARN_THRESHOLD for v in etas):
        warnings.warn(
            "eta parameter exceeds 0.1: the gradient expansion is marginal", stacklevel=2
        )
    return etas


def compute_stark_shift(omega_s: float, eta1: float, eta2: float) -> float:
    """Spin-dependent Stark shift omega_s (eta2 - eta1) (rad/s)."""
    return omega_s * (eta2 - eta1)


def compute_dispersive_shifts(
    omega_12: float,
    delta_a: float,
    delta_s: float,
    eta0: float,
    eta1: float,
    eta2: float,
    omega_s: float,
    omega_x: float,
) -> tuple[float, float, float]:
    """Dispersive shifts (Omega_sz, Omega_sx1, Omega_sx2) in rad/s.

    Omega_sz = Omega_12^2 / (Delta_a - Delta_s) is the two-photon shift of
    the driven lower spin branch; the Omega_sx terms are the spin-oscillator
    shifts of the two atomic levels.
    """
    detuning = delta_a - delta_s
    if detuning == 0.0:
        raise ResonantDriveError(
            "Delta_a equals Delta_s: resonant drive has no dispersive limit"
        )
    if omega_12 != 0.0 and abs(omega_12 / detuning) > DISPERSIVE_RATIO_LIMIT:
        warnings.warn(
            f"Omega_12/|Delta_a-Delta_s| = {abs(omega_12 / detuning):.3f} exceeds "
            f"{DISPERSIVE_RATIO_LIMIT}: dispersive formulas are unreliable",
            stacklevel=2,
        )
    omega_sz = omega_12**2 / detuning
    omega_sx1 = eta0**2 * omega_s**2 / (omega_x - omega_s * (1.0 - 2.0 * eta1))
    omega_sx2 = eta0**2 * omega_s**2 / (omega_x - omega_s * (1.0 - 2.0 * eta2))
    return omega_sz, omega_sx1, omega_sx2


def field_from_rabi(omega_12: float, z12: float, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Drive field amplitude hbar Omega_12 / (e z12) (V/m)."""
    if z12 == 0.0:
        raise ForbiddenTransitionError("z12 = 0: the drive cannot couple the two levels")
    return consts.hbar * omega_12 / (consts.e * abs(z12))


def rabi_from_field(e_w: float, z12: float, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Inverse of field_from_rabi: e z12 E_w / hbar (rad/s)."""
    if z12 == 0.0:
        raise ForbiddenTransitionError("z12 = 0: the drive cannot couple the two levels")
    return consts.e * abs(z12) * e_w / consts.hbar


def power_density(e_w: float, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Energy flux density c eps0 E_w^2 of the incident wave (W/m^2)."""
    return consts.c * consts.eps0 * e_w**2


def image_current(
    p: ParameterSet,
    p2_steady: float,
    dz: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> float:
    """Induced-current amplitude e n_s omega_m P2 (S/D) (z22 - z11), in A.

    omega_m enters as an angular frequency; dz is the dipole contrast
    z22 - z11 of the modulated level populations.
    """
    if not 0.0 <= p2_steady <= 1.0:
        raise InvalidParameterError("p2_steady must be a population fraction in [0, 1]")
    if p.plate_d <= 0.0:
        raise InvalidParameterError("plate height must be positive")
    return consts.e * p.n_s * p.omega_m * p2_steady * (p.plate_s / p.plate_d) * dz


def lorentz_term_magnitude(
    z_nm: float,
    omega_y: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> tuple[float, float]:
    """Orbit-field moment e z_nm sqrt(hbar omega_y / (8 m_e)) and its ratio to u_b.

    This moment couples the atomic levels to the transverse oscillator
    through the static wire field; it is far off resonance and only its
    magnitude is reported.
    """
    u_nm = consts.e * z_nm * math.sqrt(consts.hbar * omega_y / (8.0 * consts.m_e))
    return u_nm, u_nm / consts.u_b


def vertical_curvature_term(
    q_zz: float,
    omega_a: float,
    r_b: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> tuple[float, float]:
    """Magnitude of the dropped e z^2 Q_zz term and its ratio to hbar omega_a.

    Uses the zero-field ground-state spread <z^2> = 3 r_b^2 as the scale;
    the term is reported for the negligibility record and never enters
    the vertical eigenproblem.
    """
    energy = consts.e * abs(q_zz) * 3.0 * r_b**2
    return energy, energy / (consts.hbar * omega_a)


def esr_field_amplitude(i_0: float, l: float, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Pulse field amplitude mu0 I_0 / (pi l) at the trap site (T)."""
    if l <= 0.0:
        raise InvalidParameterError("electrode length l must be positive")
    return consts.mu0 * i_0 / (math.pi * l)


def esr_rabi_frequency(b_tilde_z: float, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Spin Rabi frequency u_b B_z / hbar of the pulse drive (rad/s)."""
    return consts.u_b * b_tilde_z / consts.hbar


def derive_parameters(
    p: ParameterSet,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    dipoles: hydrogen1d.DipoleTable | None = None,
    omega_a: float = math.nan,
) -> DerivedParameters:
    """Run the full derivation chain.

    When ``dipoles`` is omitted the vertical-motion solver is run at the
    operating pressing field to obtain z11, z12, z22 and omega_a.
    """
    if dipoles is None:
        spec = hydrogen1d.solve_spectrum(
            hydrogen1d.default_potential(p.e_z, consts), n_levels=2, consts=consts
        )
        dipoles = hydrogen1d.dipole_elements(spec, consts)
        omega_a = spec.omega_a()
    b0 = compute_b0(p.i_dc, p.h, consts)
    omega_s = compute_spin_splitting(b0, consts)
    omega_x, omega_y = compute_lateral_frequencies(p, consts)
    x0 = oscillator_length(omega_x, consts)
    eta0, eta1, eta2 = compute_eta_parameters(x0, dipoles.z11, dipoles.z22, p.h)
    delta_s = compute_stark_shift(omega_s, eta1, eta2)
    delta_a = p.delta_a if p.delta_a is not None else delta_s + p.delta_a_offset
    delta_x = omega_x - omega_s
    omega_sz, omega_sx1, omega_sx2 = compute_dispersive_shifts(
        p.omega_12, delta_a, delta_s, eta0, eta1, eta2, omega_s, omega_x
    )
    b_tilde_z = esr_field_amplitude(p.i_0_esr, p.l, consts)
    return DerivedParameters(
        b0=b0,
        omega_s=omega_s,
        omega_x=omega_x,
        omega_y=omega_y,
        x0=x0,
        eta0=eta0,
        eta1=eta1,
        eta2=eta2,
        delta_s=delta_s,
        delta_a=delta_a,
        delta_x=delta_x,
        omega_sz=omega_sz,
        omega_sx1=omega_sx1,
        omega_sx2=omega_sx2,
        omega_s_esr=esr_rabi_frequency(b_tilde_z, consts),
        b_tilde_z=b_tilde_z,
        z11=dipoles.z11,
        z12=dipoles.z12,
        z22=dipoles.z22,
        r_b=dipoles.r_b,
        omega_a=omega_a,
    )


def regime_flags(
    p: ParameterSet,
    dp: DerivedParameters,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> dict[str, dict]:
    """Named validity checks of the operating regime.

    Each entry carries the measured value, the threshold, and a boolean.
    """
    detuning = dp.delta_a - dp.delta_s
    checks = {
        "eta0_small": (dp.eta0, ETA_WARN_THRESHOLD, dp.eta0 < ETA_WARN_THRESHOLD),
        "eta1_small": (dp.eta1, ETA_WARN_THRESHOLD, dp.eta1 < ETA_WARN_THRESHOLD),
        "eta2_small": (dp.eta2, ETA_WARN_THRESHOLD, dp.eta2 < ETA_WARN_THRESHOLD),
        "drive_dispersive": (
            abs(p.omega_12),
            DISPERSIVE_RATIO_LIMIT * abs(detuning),
            abs(p.omega_12) < DISPERSIVE_RATIO_LIMIT * abs(detuning),
        ),
        "oscillator_detuned": (dp.delta_x, dp.omega_s, dp.delta_x > dp.omega_s),
        "spin_polarizable": (
            consts.hbar * dp.omega_s,
            consts.k_b * p.temperature,
            consts.hbar * dp.omega_s > consts.k_b * p.temperature,
        ),
        "current_density_feasible": (
            p.i_dc / (p.d * p.d),
            1e12,  # A/m^2, type-I critical density scale 1e8 A/cm^2
            p.i_dc / (p.d * p.d) < 1e12,
        ),
    }
    return {
        name: {"value": val, "threshold": thr, "ok": ok}
        for name, (val, thr, ok) in checks.items()
    }


def provenance_rows(
    p: ParameterSet,
    dp: DerivedParameters,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> list[dict]:
    """Flat provenance table: quantity, value, unit, formula, note."""
    u_lorentz, lorentz_ratio = lorentz_term_magnitude(dp.r_b, dp.omega_y, consts)
    i0_estimate = image_current(p, 0.1, dp.z22 - dp.z11, consts)
    if math.isfinite(dp.omega_a):
        _, curvature_ratio = vertical_curvature_term(p.q_zz, dp.omega_a, dp.r_b, consts)
    else:
        curvature_ratio = math.nan

    def row(q, v, unit, formula, note="derived"):
        return {"quantity": q, "value": v, "unit": unit, "formula": formula, "note": note}

    rows = [
        row("I_dc", p.i_dc, "A", "input", "input"),
        row("h", p.h, "m", "input", "input"),
        row("l", p.l, "m", "input", "input"),
        row("d", p.d, "m", "input", "input"),
        row("V_bias", p.v_bias, "V", "input", "input"),
        row("T", p.temperature, "K", "input", "input"),
        row("E_z", p.e_z, "V/m", "e_z_per_volt * V_bias", "per-volt convention"),
        row("Q_xx", p.q_xx, "V/m^2", "q_xx_per_volt * V_bias", "per-volt convention"),
        row("Q_yy", p.q_yy, "V/m^2", "q_yy_per_volt * V_bias", "per-volt convention"),
        row("Q_zz", p.q_zz, "V/m^2", "q_zz_per_volt * V_bias", "per-volt convention"),
        row("Lambda", consts.image_strength, "J m",
            "(eps_he-1) e^2 / (16 pi eps0 (eps_he+1))"),
        row("r_b", dp.r_b, "m", "hbar^2 / (m_e Lambda)"),
        row("B0", dp.b0, "T", "mu0 I_dc / (2 pi h)",
            "formula value; a simple halving of it is inconsistent with omega_s"),
        row("omega_s", dp.omega_s, "rad/s", "2 u_b B0 / hbar"),
        row("omega_x", dp.omega_x, "rad/s", "sqrt(2 e Q_xx / m_e)"),
        row("omega_y", dp.omega_y, "rad/s", "sqrt(2 e Q_yy / m_e)"),
        row("x0", dp.x0, "m", "sqrt(hbar / (2 m_e omega_x))"),
        row("z11", dp.z11, "m", "<1|z|1> at E_z", "vertical solver"),
        row("z12", dp.z12, "m", "<1|z|2> at E_z", "vertical solver"),
        row("z22", dp.z22, "m", "<2|z|2> at E_z", "vertical solver"),
        row("eta0", dp.eta0, "1", "x0 / (2h)"),
        row("eta1", dp.eta1, "1", "z11 / (2h)"),
        row("eta2", dp.eta2, "1", "z22 / (2h)"),
        row("Delta_s", dp.delta_s, "rad/s", "omega_s (eta2 - eta1)"),
        row("Delta_a", dp.delta_a, "rad/s", "Delta_s + delta_a_offset"
            if p.delta_a is None else "input"),
        row("Delta_x", dp.delta_x, "rad/s", "omega_x - omega_s"),
        row("Omega_12", p.omega_12, "rad/s", "input", "input"),
        row("Omega_sz", dp.omega_sz, "rad/s", "Omega_12^2 / (Delta_a - Delta_s)"),
        row("Omega_sx1", dp.omega_sx1, "rad/s",
            "eta0^2 omega_s^2 / (omega_x - omega_s (1 - 2 eta1))"),
        row("Omega_sx2", dp.omega_sx2, "rad/s",
            "eta0^2 omega_s^2 / (omega_x - omega_s (1 - 2 eta2))"),
        row("B_tilde_z", dp.b_tilde_z, "T", "mu0 I_0 / (pi l)"),
        row("Omega_s_esr", dp.omega_s_esr, "rad/s", "u_b B_tilde_z / hbar"),
        row("u_orbit(r_b)", u_lorentz, "A m^2", "e r_b sqrt(hbar omega_y / (8 m_e))",
            "orbit-field moment; off-resonant, neglected in the model"),
        row("u_orbit/u_b", lorentz_ratio, "1", "u_orbit / u_b",
            "negligibility indicator"),
        row("z2_curvature/hbar_omega_a", curvature_ratio, "1",
            "e |Q_zz| 3 r_b^2 / (hbar omega_a)",
            "dropped vertical-curvature term; negligibility indicator"),
        row("i_0(P2=0.1)", i0_estimate, "A",
            "e n_s omega_m P2 (S/D)(z22 - z11)",
            "induced-current amplitude at 10% steady excitation"),
    ]
    return rows


# Dimensional audit: SI base exponents (kg, m, s, A, K) per symbol, and the
# operand powers of every derived formula. A test composes each formula's
# exponents and compares against the declared result dimensions.
UNIT_EXPONENTS = {
    "m_e": (1, 0, 0, 0, 0),
    "e": (0, 0, 1, 1, 0),
    "hbar": (1, 2, -1, 0, 0),
    "u_b": (0, 2, 0, 1, 0),
    "mu0": (1, 1, -2, -2, 0),
    "eps0": (-1, -3, 4, 2, 0),
    "k_b": (1, 2, -2, 0, -1),
    "c": (0, 1, -1, 0, 0),
    "I_dc": (0, 0, 0, 1, 0),
    "I_0": (0, 0, 0, 1, 0),
    "h": (0, 1, 0, 0, 0),
    "l": (0, 1, 0, 0, 0),
    "length": (0, 1, 0, 0, 0),
    "area": (0, 2, 0, 0, 0),
    "V_bias": (1, 2, -3, -1, 0),
    "T": (0, 0, 0, 0, 1),
    "E_field": (1, 1, -3, -1, 0),
    "Q_curvature": (1, 0, -3, -1, 0),
    "omega": (0, 0, -1, 0, 0),
    "B_field": (1, 0, -2, -1, 0),
    "Lambda": (1, 3, -2, 0, 0),
    "n_s": (0, -2, 0, 0, 0),
    "current": (0, 0, 0, 1, 0),
    "power_flux": (1, 0, -3, 0, 0),
    "moment": (0, 2, 0, 1, 0),
    "dimensionless": (0, 0, 0, 0, 0),
}

FORMULA_DIMENSIONS = {
    # result symbol: ({operand: power}, result unit symbol)
    "B0": ({"mu0": 1, "I_dc": 1, "h": -1}, "B_field"),
    "omega_s": ({"u_b": 1, "B_field": 1, "hbar": -1}, "omega"),
    "omega_x": ({"e": 0.5, "Q_curvature": 0.5, "m_e": -0.5}, "omega"),
    "x0": ({"hbar": 0.5, "m_e": -0.5, "omega": -0.5}, "length"),
    "eta": ({"length": 1, "h": -1}, "dimensionless"),
    "Delta_s": ({"omega": 1}, "omega"),
    "Omega_sz": ({"omega": 1}, "omega"),
    "E_w": ({"hbar": 1, "omega": 1, "e": -1, "length": -1}, "E_field"),
    "P_w": ({"c": 1, "eps0": 1, "E_field": 2}, "power_flux"),
    "i0": ({"e": 1, "n_s": 1, "omega": 1, "area": 1, "length": -1, "length ": 1}, "current"),
    "u_orbit": ({"e": 1, "length": 1, "hbar": 0.5, "omega": 0.5, "m_e": -0.5}, "moment"),
    "B_tilde_z": ({"mu0": 1, "I_0": 1, "l": -1}, "B_field"),
    "Lambda": ({"e": 2, "eps0": -1}, "Lambda"),
    "r_b": ({"hbar": 2, "m_e": -1, "Lambda": -1}, "length"),
}


def audit_units() -> list[tuple[str, bool]]:
    """Compose each formula's base-unit exponents and compare to its declared result."""
    results = []
    for name, (operands, result) in FORMULA_DIMENSIONS.items():
        total = [0.0] * 5
        for sym, power in operands.items():
            exps = UNIT_EXPONENTS[sym.strip()]
            total = [t + power * x for t, x in zip(total, exps)]
        declared = UNIT_EXPONENTS[result]
        ok = all(abs(t - d) < 1e-12 for t, d in zip(total, declared))
        results.append((name, ok))
    return results
