"""Vertical-motion eigenproblem of a surface electron.

The electron bounces on the half line z >= 0 in the image potential
-Lambda/z plus a pressing field term e E_z z. A hard wall at z = 0
(psi(0) = 0) models the surface barrier. The discretization is a
three-point finite difference on a uniform grid with Dirichlet ends;
energies are Richardson-extrapolated from a grid-doubling pair, which
is also how convergence is certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .constants import DEFAULT_CONSTANTS, TWO_PI, PhysicalConstants
from .errors import InvalidPotentialError, ResolutionError

DEFAULT_Z_MAX_RB = 80.0
DEFAULT_N_POINTS = 4000
TAIL_TOLERANCE = 1e-8
ENERGY_CERT_RTOL = 1e-6
POINTS_PER_WAVELENGTH = 40.0


def bohr_radius(consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Length scale hbar^2 / (m_e Lambda) of the image-bound states (m)."""
    return consts.hbar**2 / (consts.m_e * consts.image_strength)


def analytic_energies(n: np.ndarray | int, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Zero-field bound energies -Lambda^2 m_e / (2 hbar^2 n^2), in J."""
    n = np.asarray(n, dtype=float)
    return -consts.image_strength**2 * consts.m_e / (2.0 * consts.hbar**2 * n**2)


@dataclass(frozen=True)
class Potential1D:
    """Half-line potential -image_strength/z + e*pressing_field*z.

    The grid excludes both endpoints: the first sample sits one spacing
    above the wall, so the 1/z singularity is never evaluated at z = 0.
    """

    image_strength: float                 # Lambda (J m)
    pressing_field: float                 # E_z (V/m), >= 0
    z_max: float                          # domain cutoff (m)
    n_points: int = DEFAULT_N_POINTS

    def __post_init__(self):
        if self.image_strength <= 0.0:
            raise InvalidPotentialError("image_strength must be positive")
        if self.pressing_field < 0.0:
            raise InvalidPotentialError(
                "negative pressing field makes the spectrum unbounded from below"
            )
        if self.z_max <= 0.0:
            raise InvalidPotentialError("z_max must be positive")
        if self.n_points < 50:
            raise InvalidPotentialError("n_points too small to resolve any bound state")

    def grid(self, n_points: int | None = None) -> tuple[np.ndarray, float]:
        n = self.n_points if n_points is None else n_points
        dz = self.z_max / (n + 1)
        return dz * np.arange(1, n + 1), dz

    def values(self, z: np.ndarray, charge: float) -> np.ndarray:
        return -self.image_strength / z + charge * self.pressing_field * z


def default_potential(
    pressing_field: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    z_max_rb: float = DEFAULT_Z_MAX_RB,
    n_points: int = DEFAULT_N_POINTS,
) -> Potential1D:
    """Potential with the helium image strength and z_max in units of the Bohr radius."""
    return Potential1D(
        image_strength=consts.image_strength,
        pressing_field=pressing_field,
        z_max=z_max_rb * bohr_radius(consts),
        n_points=n_points,
    )


@dataclass
class Spectrum1D:
    """Eigenpairs of the vertical motion on the fine grid.

    energies are Richardson-extrapolated; wavefunctions are unit-normalized
    on the fine grid with a positive slope at the wall.
    """

    energies: np.ndarray          # (n_levels,) J, ascending
    grid: np.ndarray              # (n,) m
    dz: float                     # grid spacing (m)
    wavefunctions: np.ndarray     # (n_levels, n)
    n_levels: int
    pressing_field: float
    tail_ratios: np.ndarray = field(repr=False, default=None)
    energy_drift: np.ndarray = field(repr=False, default=None)  # certification metric

    def omega_a(self) -> float:
        """Transition angular frequency between the two lowest levels (rad/s)."""
        return float(self.energies[1] - self.energies[0]) / DEFAULT_CONSTANTS.hbar

    def overlap(self, n: int, m: int) -> float:
        return float(np.sum(self.wavefunctions[n] * self.wavefunctions[m]) * self.dz)

    def node_count(self, n: int) -> int:
        psi = self.wavefunctions[n]
        cut = 1e-9 * np.abs(psi).max()
        s = np.sign(psi[np.abs(psi) > cut])
        return int(np.sum(s[1:] != s[:-1]))


def _solve_grid(pot: Potential1D, n_points: int, n_levels: int, consts: PhysicalConstants):
    z, dz = pot.grid(n_points)
    v = pot.values(z, consts.e)
    t = consts.hbar**2 / (2.0 * consts.m_e * dz**2)
    w, vec = eigh_tridiagonal(
        2.0 * t + v, -t * np.ones(n_points - 1), select="i", select_range=(0, n_levels - 1)
    )
    vec = vec / math.sqrt(dz)
    # deterministic sign: positive slope at the wall
    for n in range(n_levels):
        lead = vec[: max(8, n_points // 200), n]
        if lead[np.argmax(np.abs(lead))] < 0.0:
            vec[:, n] = -vec[:, n]
    return z, dz, w, vec


def _check_de_broglie(pot: Potential1D, energies: np.ndarray, dz: float, consts: PhysicalConstants):
    # Count points per local wavelength where the motion is oscillatory.
    # The linear core below ~r_b/2 carries no oscillation and is excluded.
    rb = consts.hbar**2 / (consts.m_e * pot.image_strength)
    z, _ = pot.grid()
    zs = z[z >= 0.5 * rb]
    kin = energies[-1] - pot.values(zs, consts.e)
    kin = kin[kin > 0.0]
    if kin.size == 0:
        return
    p_max = math.sqrt(2.0 * consts.m_e * kin.max())
    lam_min = TWO_PI * consts.hbar / p_max
    if lam_min / dz < POINTS_PER_WAVELENGTH:
        raise ResolutionError(
            f"grid supplies {lam_min / dz:.1f} points per local wavelength, "
            f"need {POINTS_PER_WAVELENGTH:.0f}; increase n_points"
        )


def solve_spectrum(
    pot: Potential1D,
    n_levels: int = 6,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    auto_extend: bool = True,
) -> Spectrum1D:
    """Solve the bound spectrum with grid-doubling certification.

    Solves at n, 2n and 4n points; returns Richardson-extrapolated
    energies from the (2n, 4n) pair and certifies that the extrapolated
    values moved by less than 1e-6 relative between refinement levels.
    If the requested levels leak past z_max, the domain is extended at
    constant point density (up to four times) unless auto_extend=False.
    """
    if n_levels < 2:
        raise InvalidPotentialError("n_levels must be at least 2")
    current = pot
    for _ in range(5):
        n = current.n_points
        _, _, w1, _ = _solve_grid(current, n, n_levels, consts)
        _, _, w2, _ = _solve_grid(current, 2 * n, n_levels, consts)
        z4, dz4, w4, v4 = _solve_grid(current, 4 * n, n_levels, consts)
        rich_lo = (4.0 * w2 - w1) / 3.0
        rich_hi = (4.0 * w4 - w2) / 3.0
        drift = np.abs(rich_hi - rich_lo) / np.abs(rich_hi)
        tails = np.abs(v4[-1, :]) / np.abs(v4).max(axis=0)
        if np.all(tails < TAIL_TOLERANCE):
            if np.any(drift > ENERGY_CERT_RTOL):
                raise ResolutionError(
                    f"energy drift {drift.max():.2e} under grid doubling exceeds "
                    f"{ENERGY_CERT_RTOL:.0e}; increase n_points"
                )
            _check_de_broglie(current, rich_hi, current.z_max / (n + 1), consts)
            return Spectrum1D(
                energies=rich_hi,
                grid=z4,
                dz=dz4,
                wavefunctions=v4.T.copy(),
                n_levels=n_levels,
                pressing_field=current.pressing_field,
                tail_ratios=tails,
                energy_drift=drift,
            )
        if not auto_extend:
            raise ResolutionError(
                f"wavefunction tail {tails.max():.2e} at z_max exceeds {TAIL_TOLERANCE:.0e}; "
                "increase z_max"
            )
        current = Potential1D(
            image_strength=current.image_strength,
            pressing_field=current.pressing_field,
            z_max=1.5 * current.z_max,
            n_points=int(round(1.5 * current.n_points)),
        )
    raise ResolutionError("domain extension did not contain the requested levels")


@dataclass
class DipoleTable:
    """Position matrix elements <n|z|m> on the solved grid."""

    z_nm: np.ndarray   # (n_levels, n_levels) m, symmetric
    r_b: float         # Bohr-radius scale (m)

    def __post_init__(self):
        asym = np.abs(self.z_nm - self.z_nm.T).max()
        scale = np.abs(self.z_nm).max()
        if scale > 0.0 and asym / scale > 1e-10:
            raise ResolutionError("dipole table is not symmetric")

    @property
    def z11(self) -> float:
        return float(self.z_nm[0, 0])

    @property
    def z12(self) -> float:
        return float(self.z_nm[0, 1])

    @property
    def z22(self) -> float:
        return float(self.z_nm[1, 1])


def dipole_elements(spec: Spectrum1D, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> DipoleTable:
    """Quadrature of psi_n z psi_m over the grid; symmetrized against roundoff."""
    psi = spec.wavefunctions
    weighted = psi * spec.grid[None, :]
    z_nm = (weighted @ psi.T) * spec.dz
    z_nm = 0.5 * (z_nm + z_nm.T)
    return DipoleTable(z_nm=z_nm, r_b=bohr_radius(consts))


@dataclass(frozen=True)
class StarkRow:
    pressing_field: float   # V/m
    omega_a: float          # rad/s
    z11: float              # m
    z12: float              # m
    z22: float              # m


def stark_scan(
    pressing_fields,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    n_levels: int = 3,
    z_max_rb: float = DEFAULT_Z_MAX_RB,
    n_points: int = DEFAULT_N_POINTS,
) -> list[StarkRow]:
    """Spectrum summary per pressing field; omega_a grows monotonically with the field."""
    rows = []
    for e_z in pressing_fields:
        if e_z < 0.0:
            raise InvalidPotentialError("scan fields must be non-negative")
        spec = solve_spectrum(
            default_potential(e_z, consts, z_max_rb, n_points), n_levels, consts
        )
        dip = dipole_elements(spec, consts)
        rows.append(
            StarkRow(
                pressing_field=float(e_z),
                omega_a=spec.omega_a(),
                z11=dip.z11,
                z12=dip.z12,
                z22=dip.z22,
            )
        )
    return rows


def find_field_for_transition(
    omega_a_target: float,
    field_lo: float = 1e2,
    field_hi: float = 1e5,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    n_points: int = DEFAULT_N_POINTS,
    xtol: float = 1.0,
) -> float:
    """Pressing field (V/m) at which the lowest transition hits omega_a_target (rad/s)."""

    def gap(e_z: float) -> float:
        spec = solve_spectrum(default_potential(e_z, consts, n_points=n_points), 2, consts)
        return spec.omega_a() - omega_a_target

    return float(brentq(gap, field_lo, field_hi, xtol=xtol))
