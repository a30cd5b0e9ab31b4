"""Physical constants and the helium image-charge strength.

All quantities are SI. Frequencies anywhere in the package are angular
(rad/s); conversion to Hz happens only at presentation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants (CODATA 2018) plus the helium dielectric constant."""

    m_e: float = 9.1093837015e-31   # electron mass (kg)
    e: float = 1.602176634e-19      # elementary charge (C), positive
    hbar: float = 1.054571817e-34   # reduced Planck constant (J s)
    u_b: float = 9.2740100783e-24   # Bohr magneton (A m^2)
    mu0: float = 1.25663706212e-6   # vacuum permeability (T m / A)
    eps0: float = 8.8541878128e-12  # vacuum permittivity (F / m)
    eps_he: float = 1.057           # relative dielectric constant of liquid helium
    k_b: float = 1.380649e-23       # Boltzmann constant (J / K)
    c: float = 2.99792458e8         # speed of light (m / s)

    def __post_init__(self):
        for name in ("m_e", "e", "hbar", "u_b", "mu0", "eps0", "eps_he", "k_b", "c"):
            if getattr(self, name) <= 0.0:
                raise InvalidParameterError(f"{name} must be strictly positive")
        if self.eps_he <= 1.0:
            raise InvalidParameterError("eps_he must exceed 1 for an attractive image potential")

    @property
    def image_strength(self) -> float:
        """Image-potential strength (eps_he-1) e^2 / [16 pi eps0 (eps_he+1)], in J m."""
        return (self.eps_he - 1.0) * self.e**2 / (
            16.0 * math.pi * self.eps0 * (self.eps_he + 1.0)
        )


DEFAULT_CONSTANTS = PhysicalConstants()
