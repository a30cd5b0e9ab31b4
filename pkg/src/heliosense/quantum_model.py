"""Composite Hilbert space and Hamiltonian builders.

The space is atom (two levels) x spin (down, up) x lateral oscillator
(Fock truncation N), with basis index ((a*2)+s)*N + k. Spin operators
follow the quantization axis of the static wire field, which points
along x: sigma_x is diagonal in (down, up) and sigma_z flips the spin.

Builders return dense complex matrices in joules. The time-dependent
interaction-picture Hamiltonian factorizes as e^{iDt} W e^{-iDt} with a
diagonal frame generator D; ``rotating_frame`` exposes (D, W), which the
dynamics module exponentiates exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import DEFAULT_CONSTANTS, PhysicalConstants
from .errors import InvalidParameterError
from .params import DerivedParameters, ParameterSet, compute_dispersive_shifts

# spin matrices in the (down, up) basis, quantized along the static field
SIGMA_X = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_Y = np.array([[0.0, 1j], [-1j, 0.0]])
SIGMA_Z = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
P_DOWN = np.diag([1.0, 0.0]).astype(complex)
P_UP = np.diag([0.0, 1.0]).astype(complex)
S_DOWN_UP = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |down><up|

P1 = np.diag([1.0, 0.0]).astype(complex)
P2 = np.diag([0.0, 1.0]).astype(complex)
S12 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)        # |1><2|


def fock_ladder(n: int) -> np.ndarray:
    """Annihilation operator on an n-dimensional Fock truncation."""
    return np.diag(np.sqrt(np.arange(1.0, n)), 1).astype(complex)


@dataclass(frozen=True)
class HilbertSpec:
    """Tensor layout atom x spin x Fock with a fixed, documented ordering."""

    n_fock: int = 8

    def __post_init__(self):
        if self.n_fock < 1:
            raise InvalidParameterError("n_fock must be at least 1")

    @property
    def dim(self) -> int:
        return 4 * self.n_fock

    def index(self, atom: int, spin: int, fock: int) -> int:
        if not (0 <= atom < 2 and 0 <= spin < 2 and 0 <= fock < self.n_fock):
            raise InvalidParameterError("basis labels out of range")
        return (atom * 2 + spin) * self.n_fock + fock

    def labels(self) -> list[str]:
        spins = ("dn", "up")
        return [
            f"|{a + 1},{spins[s]},{k}>"
            for a in range(2)
            for s in range(2)
            for k in range(self.n_fock)
        ]

    def basis_state(self, atom: int, spin: int, fock: int) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index(atom, spin, fock)] = 1.0
        return psi

    def embed(self, atom_op=None, spin_op=None, fock_op=None) -> np.ndarray:
        a = np.eye(2, dtype=complex) if atom_op is None else np.asarray(atom_op, complex)
        s = np.eye(2, dtype=complex) if spin_op is None else np.asarray(spin_op, complex)
        f = (
            np.eye(self.n_fock, dtype=complex)
            if fock_op is None
            else np.asarray(fock_op, complex)
        )
        return np.kron(np.kron(a, s), f)


@dataclass(frozen=True)
class ModelParams:
    """Frequencies and couplings entering the Hamiltonians (rad/s, dimensionless etas).

    ``drive_phase`` is the frozen traveling-wave phase k_T x at the trap
    site; the electron's excursion is negligible on the drive wavelength,
    so it enters only as a constant phase of the drive amplitude.
    """

    omega_a: float
    omega_x: float
    omega_s: float
    eta0: float
    eta1: float
    eta2: float
    eta12: float
    omega_12: float
    delta_a: float
    drive_phase: float = 0.0
    omega_1: float = 0.0

    @property
    def omega_2(self) -> float:
        return self.omega_1 + self.omega_a

    @property
    def delta_s(self) -> float:
        return self.omega_s * (self.eta2 - self.eta1)

    @property
    def delta_x(self) -> float:
        return self.omega_x - self.omega_s

    @property
    def omega_t(self) -> float:
        """Drive frequency omega_a + delta_a (rad/s)."""
        return self.omega_a + self.delta_a

    @property
    def drive_amplitude(self) -> complex:
        return self.omega_12 * np.exp(-1j * self.drive_phase)

    @classmethod
    def from_derived(cls, dp: DerivedParameters, p: ParameterSet) -> "ModelParams":
        return cls(
            omega_a=dp.omega_a,
            omega_x=dp.omega_x,
            omega_s=dp.omega_s,
            eta0=dp.eta0,
            eta1=dp.eta1,
            eta2=dp.eta2,
            eta12=dp.z12 / (2.0 * p.h),
            omega_12=p.omega_12,
            delta_a=dp.delta_a,
        )

    def dispersive_shifts(self) -> tuple[float, float, float]:
        return compute_dispersive_shifts(
            self.omega_12, self.delta_a, self.delta_s,
            self.eta0, self.eta1, self.eta2, self.omega_s, self.omega_x,
        )


def assert_hermitian(m: np.ndarray, rtol: float = 1e-12) -> None:
    scale = max(np.abs(m).max(), 1e-300)
    dev = np.abs(m - m.conj().T).max() / scale
    if dev > rtol:
        raise InvalidParameterError(f"matrix not hermitian: relative deviation {dev:.2e}")


def unitarity_defect(u: np.ndarray) -> float:
    """Operator-norm-ish defect max|U^dag U - 1|."""
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def build_h0(spec: HilbertSpec, mp: ModelParams, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Bare atom levels plus the lateral oscillator ladder (diagonal)."""
    hbar = consts.hbar
    a = fock_ladder(spec.n_fock)
    number = a.conj().T @ a
    h = hbar * spec.embed(atom_op=mp.omega_1 * P1 + mp.omega_2 * P2)
    h += hbar * mp.omega_x * spec.embed(fock_op=number + 0.5 * np.eye(spec.n_fock))
    return h


def build_spin_dipole_v(spec: HilbertSpec, mp: ModelParams, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Magnetic dipole coupling of the spin to the wire field.

    (hbar omega_s / 2)(1 - z/h) sigma_x - (hbar omega_s / 2)(x/h) sigma_z,
    with z projected onto the two atomic levels and x = x0 (a^dag + a).
    """
    hbar = consts.hbar
    z_over_h = 2.0 * np.array(
        [[mp.eta1, mp.eta12], [mp.eta12, mp.eta2]], dtype=complex
    )
    a = fock_ladder(spec.n_fock)
    v = 0.5 * hbar * mp.omega_s * spec.embed(
        atom_op=np.eye(2) - z_over_h, spin_op=SIGMA_X
    )
    v -= hbar * mp.eta0 * mp.omega_s * spec.embed(spin_op=SIGMA_Z, fock_op=a + a.conj().T)
    return v


def build_h_static(spec: HilbertSpec, mp: ModelParams, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Drive-free diagonal part: bare levels plus the level-dependent spin splitting."""
    hbar = consts.hbar
    h = build_h0(spec, mp, consts)
    h += 0.5 * hbar * mp.omega_s * spec.embed(spin_op=SIGMA_X)
    h -= hbar * mp.omega_s * spec.embed(
        atom_op=mp.eta1 * P1 + mp.eta2 * P2, spin_op=SIGMA_X
    )
    return h


def build_h_total(
    spec: HilbertSpec,
    mp: ModelParams,
    t: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
    drive_scale: float = 1.0,
) -> np.ndarray:
    """Laboratory-frame Hamiltonian: static part, cosine drive, gradient coupling.

    ``drive_scale`` rescales the cosine amplitude; the interaction-picture
    form absorbs the rotating-wave factor 1/2 into its drive amplitude, so
    frame-equivalence comparisons use drive_scale=2.
    """
    hbar = consts.hbar
    a = fock_ladder(spec.n_fock)
    h = build_h_static(spec, mp, consts)
    drive = hbar * drive_scale * mp.omega_12 * np.cos(mp.omega_t * t - mp.drive_phase)
    h += drive * spec.embed(atom_op=S12 + S12.conj().T)
    h -= hbar * mp.eta0 * mp.omega_s * spec.embed(spin_op=SIGMA_Z, fock_op=a + a.conj().T)
    return h


def build_h_int(
    spec: HilbertSpec,
    mp: ModelParams,
    t: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> np.ndarray:
    """Interaction-picture Hamiltonian with its four rotating terms.

    Spin-conserving drive terms at phases (delta_a -/+ delta_s) for the
    down/up branches, and spin-flip phonon terms at delta_x + 2 eta_n omega_s
    for the two atomic levels.
    """
    hbar = consts.hbar
    a = fock_ladder(spec.n_fock)
    ad = a.conj().T
    om_d = mp.drive_amplitude
    terms = (
        hbar * om_d * np.exp(1j * (mp.delta_a - mp.delta_s) * t)
        * spec.embed(atom_op=S12, spin_op=P_DOWN)
        + hbar * om_d * np.exp(1j * (mp.delta_a + mp.delta_s) * t)
        * spec.embed(atom_op=S12, spin_op=P_UP)
        - hbar * mp.eta0 * mp.omega_s
        * np.exp(1j * (mp.delta_x + 2.0 * mp.eta1 * mp.omega_s) * t)
        * spec.embed(atom_op=P1, spin_op=S_DOWN_UP, fock_op=ad)
        - hbar * mp.eta0 * mp.omega_s
        * np.exp(1j * (mp.delta_x + 2.0 * mp.eta2 * mp.omega_s) * t)
        * spec.embed(atom_op=P2, spin_op=S_DOWN_UP, fock_op=ad)
    )
    return terms + terms.conj().T


def rotating_frame(spec: HilbertSpec, mp: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal generator D (rad/s) and constant W with H_int(t) = e^{iDt} W e^{-iDt}."""
    d = np.zeros(spec.dim)
    for atom in range(2):
        a_part = 0.0 if atom == 0 else -mp.delta_a
        eta_n = mp.eta1 if atom == 0 else mp.eta2
        for spin in range(2):
            sign = -1.0 if spin == 0 else 1.0
            s_part = 0.0 if spin == 0 else mp.omega_s
            for k in range(spec.n_fock):
                d[spec.index(atom, spin, k)] = (
                    a_part + s_part + mp.omega_x * k - sign * eta_n * mp.omega_s
                )
    return d, build_h_int(spec, mp, 0.0)


def build_h_d(spec: HilbertSpec, mp: ModelParams, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Resonant spin-selective drive: hbar (Omega_d |1><2| + h.c.) on the down branch."""
    hbar = consts.hbar
    half = hbar * mp.drive_amplitude * spec.embed(atom_op=S12, spin_op=P_DOWN)
    return half + half.conj().T


def build_h_eff(
    spec: HilbertSpec,
    mp: ModelParams,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> tuple[np.ndarray, np.ndarray]:
    """Dispersive Hamiltonian and its ground-manifold 2x2 reduction.

    The full form carries the two-photon shift on the down branch and the
    spin-oscillator shifts per atomic level; restricted to atom level 1
    and the oscillator ground state it reduces to
    hbar Omega_sz |down><down| - hbar Omega_sx1 |up><up|.
    """
    hbar = consts.hbar
    omega_sz, omega_sx1, omega_sx2 = mp.dispersive_shifts()
    a = fock_ladder(spec.n_fock)
    number = a.conj().T @ a
    sx_pop = P_UP - P_DOWN  # |up><up| - |down><down|
    h = hbar * omega_sz * spec.embed(atom_op=P1 - P2, spin_op=P_DOWN)
    h -= hbar * omega_sx1 * spec.embed(atom_op=P1, spin_op=sx_pop, fock_op=number)
    h -= hbar * omega_sx2 * spec.embed(atom_op=P2, spin_op=sx_pop, fock_op=number)
    h -= hbar * omega_sx1 * spec.embed(atom_op=P1, spin_op=P_UP)
    h -= hbar * omega_sx2 * spec.embed(atom_op=P2, spin_op=P_UP)
    reduced = hbar * np.diag([omega_sz, -omega_sx1]).astype(complex)
    return h, reduced


def dump_matrix_csv(m: np.ndarray, path, spec: HilbertSpec | None = None) -> None:
    """Debug dump: one (row, col, re, im) line per nonzero entry.

    When a HilbertSpec is given, a basis-label legend is appended as
    comment lines.
    """
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "re", "im"])
        rows, cols = np.nonzero(m)
        for i, j in zip(rows, cols):
            writer.writerow([int(i), int(j), m[i, j].real, m[i, j].imag])
        if spec is not None:
            for idx, label in enumerate(spec.labels()):
                fh.write(f"# {idx} {label}\n")


def esr_spin_matrix(omega_s_esr: float, theta: float, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Pulse Hamiltonian (hbar Omega_s / 2)(e^{i theta}|down><up| + h.c.) on the spin."""
    hbar = consts.hbar
    half = 0.5 * hbar * omega_s_esr * np.exp(1j * theta) * S_DOWN_UP
    return half + half.conj().T


def build_h_esr(
    spec: HilbertSpec,
    omega_s_esr: float,
    theta: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> np.ndarray:
    """ESR pulse Hamiltonian embedded in the full space (identity elsewhere)."""
    return spec.embed(spin_op=esr_spin_matrix(omega_s_esr, theta, consts))
