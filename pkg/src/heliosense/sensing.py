"""Field-sensitivity estimates from the two-photon shift.

A signal of amplitude E_w drives the vertical transition at Rabi
frequency e z12 E_w / hbar; far detuned, it shifts the driven spin
branch by Omega_sz = Omega_12^2 / (Delta_a - Delta_s), and the echo
accumulates Omega_sz * Delta_t. Requiring that phase to reach a
threshold fixes the minimal detectable field for each insertion time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import DEFAULT_CONSTANTS, PhysicalConstants
from .errors import InvalidParameterError
from .params import field_from_rabi, power_density

# Published minimal-detectable figures quoted for comparison; raw numbers
# are reported side by side without normalization (areas and bandwidths
# differ between schemes).
DEFAULT_BENCHMARKS = (
    {
        "name": "rydberg_detector_power",
        "p_min_W": 190e-15,
        "area_m2": 40e-6 * 40e-6,
        "note": "minimal detectable power over a 40 um x 40 um aperture",
    },
    {
        "name": "rydberg_detector_field",
        "e_min_V_per_m": 132e-6 * 100.0,
        "note": "minimal detectable field, 132 uV/cm",
    },
)


@dataclass(frozen=True)
class SensitivityPoint:
    delta_t: float          # signal insertion time (s)
    omega_sz: float         # required two-photon shift (rad/s)
    omega_12: float         # required drive Rabi frequency (rad/s)
    e_w: float              # minimal detectable field (V/m)
    p_w: float              # corresponding power density (W/m^2)


def sensitivity_point(
    delta_t: float,
    theta_min: float,
    detuning: float,
    z12: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> SensitivityPoint:
    """Minimal detectable field for one insertion time.

    ``detuning`` is Delta_a - Delta_s and must be positive so the
    required drive amplitude is real.
    """
    if delta_t <= 0.0 or theta_min <= 0.0:
        raise InvalidParameterError("delta_t and theta_min must be positive")
    if detuning <= 0.0:
        raise InvalidParameterError("detuning Delta_a - Delta_s must be positive")
    omega_sz = theta_min / delta_t
    omega_12 = math.sqrt(omega_sz * detuning)
    e_w = field_from_rabi(omega_12, z12, consts)
    return SensitivityPoint(
        delta_t=delta_t,
        omega_sz=omega_sz,
        omega_12=omega_12,
        e_w=e_w,
        p_w=power_density(e_w, consts),
    )


def sensitivity_curve(
    delta_ts,
    theta_min: float,
    detuning: float,
    z12: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> list[SensitivityPoint]:
    """Threshold field versus insertion time; decreases monotonically with delta_t."""
    return [sensitivity_point(dt, theta_min, detuning, z12, consts) for dt in delta_ts]


def showcase_point(
    detuning: float = 1e4,
    z12: float | None = None,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> SensitivityPoint:
    """The full-fringe operating point: phase pi accumulated over pi seconds."""
    if z12 is None:
        raise InvalidParameterError("z12 from the vertical solve is required")
    return sensitivity_point(math.pi, math.pi, detuning, z12, consts)
