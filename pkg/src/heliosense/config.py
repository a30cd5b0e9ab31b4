"""Sectioned key-value run configuration.

Files are INI-style with units spelled out in the key names. Unknown
sections or keys are rejected; every key has a default, but a provided
[parameters] section must carry at least the current, film thickness and
bias voltage so a config is never silently half-applied.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields

from .echo import NoiseModel
from .errors import ConfigError
from .params import ParameterSet
from .trap_fields import UM, SolverOptions


@dataclass(frozen=True)
class TrapConfig:
    gap_um: float = 2.0
    insulator_um: float = 0.5
    wire_plane: str = "center"
    fine_step_um: float = 0.5
    coarse_step_um: float = 1.5
    tol_V: float = 1e-7
    max_sweeps: int = 60000
    omega: float = 1.94
    far_factor: float = 3.0
    fit_radius_um: float = 3.0
    fit_zhalf_um: float = 2.5

    def __post_init__(self):
        if self.wire_plane not in ("center", "below", "above"):
            raise ConfigError(f"wire_plane must be center/below/above, got {self.wire_plane!r}")
        if self.gap_um <= 0 or self.insulator_um <= 0 or self.fine_step_um <= 0:
            raise ConfigError("trap lengths must be positive")
        if not 0.0 < self.omega < 2.0:
            raise ConfigError("SOR omega must lie in (0, 2)")

    def solver_options(self) -> SolverOptions:
        return SolverOptions(
            fine_step=self.fine_step_um * UM,
            coarse_step=self.coarse_step_um * UM,
            tol=self.tol_V,
            max_sweeps=self.max_sweeps,
            omega=self.omega,
            far_factor=self.far_factor,
        )


@dataclass(frozen=True)
class HydrogenConfig:
    z_max_rb: float = 80.0
    n_points: int = 4000
    n_levels: int = 4
    scan_lo_V_per_m: float = 0.0
    scan_hi_V_per_m: float = 2.0e4
    scan_points: int = 9


@dataclass(frozen=True)
class EchoConfig:
    free_time_s: float = 4.0
    signal_time_s: float = math.pi
    phase_1_rad: float = math.pi / 2
    phase_2_rad: float = math.pi / 2
    phase_3_rad: float = -math.pi / 2
    window_mode: str = "folded"
    shots: int = 1000
    numeric_mode: str = "effective"
    fringe_points: int = 17

    def __post_init__(self):
        if self.window_mode not in ("folded", "explicit"):
            raise ConfigError(f"window_mode must be folded/explicit, got {self.window_mode!r}")
        if self.numeric_mode not in ("effective", "full"):
            raise ConfigError(f"numeric_mode must be effective/full, got {self.numeric_mode!r}")
        if self.shots < 0:
            raise ConfigError("shots must be non-negative")


@dataclass(frozen=True)
class SensitivityConfig:
    theta_min_rad: float = math.pi / 10.0
    delta_t_lo_s: float = 0.01
    delta_t_hi_s: float = math.pi
    n_points: int = 13
    z12_field_V_per_m: float = 5.69e4   # pressing field at which z12 is evaluated


@dataclass(frozen=True)
class OutputConfig:
    formats: str = "csv,json"
    out_dir: str = "."


@dataclass(frozen=True)
class RunConfig:
    parameters: ParameterSet = field(default_factory=ParameterSet)
    trap: TrapConfig = field(default_factory=TrapConfig)
    hydrogen: HydrogenConfig = field(default_factory=HydrogenConfig)
    echo: EchoConfig = field(default_factory=EchoConfig)
    noise: NoiseModel = field(default_factory=NoiseModel)
    sensitivity: SensitivityConfig = field(default_factory=SensitivityConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


# [section][key] -> (python type, target dataclass field, scale)
_PARAM_KEYS = {
    "i_dc_A": (float, "i_dc", 1.0),
    "h_um": (float, "h", 1e-6),
    "l_um": (float, "l", 1e-6),
    "d_um": (float, "d", 1e-6),
    "v_bias_V": (float, "v_bias", 1.0),
    "temperature_K": (float, "temperature", 1.0),
    "e_z_per_volt_V_per_m": (float, "e_z_per_volt", 1.0),
    "q_xx_per_volt_V_per_m2": (float, "q_xx_per_volt", 1.0),
    "q_yy_per_volt_V_per_m2": (float, "q_yy_per_volt", 1.0),
    "q_zz_per_volt_V_per_m2": (float, "q_zz_per_volt", 1.0),
    "omega_12_rad_per_s": (float, "omega_12", 1.0),
    "delta_a_rad_per_s": (float, "delta_a", 1.0),
    "delta_a_offset_rad_per_s": (float, "delta_a_offset", 1.0),
    "i_0_A": (float, "i_0_esr", 1.0),
    "omega_m_rad_per_s": (float, "omega_m", 1.0),
    "n_s_per_m2": (float, "n_s", 1.0),
    "plate_d_m": (float, "plate_d", 1.0),
    "plate_s_m2": (float, "plate_s", 1.0),
}

_REQUIRED_PARAM_KEYS = ("i_dc_A", "h_um", "v_bias_V")

_NOISE_KEYS = {
    "kind": (str, "kind", None),
    "current_ppm": (float, "sigma_current", 1e-6),
    "ripplon_ppm": (float, "sigma_ripplon", 1e-6),
    "tau_current_s": (float, "tau_current", 1.0),
    "tau_ripplon_s": (float, "tau_ripplon", 1.0),
    "seed": (int, "seed", None),
    "substeps": (int, "substeps", None),
}

_SIMPLE_SECTIONS = {
    "trap": TrapConfig,
    "hydrogen": HydrogenConfig,
    "echo": EchoConfig,
    "sensitivity": SensitivityConfig,
    "output": OutputConfig,
}


def _convert(section: str, key: str, raw: str, typ):
    try:
        if typ is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return typ(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: expected {typ.__name__}") from exc


def _load_simple(section: str, cls, items: dict[str, str]):
    spec = {f.name: f.type for f in fields(cls)}
    kwargs = {}
    for key, raw in items.items():
        if key not in spec:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
        typ = {"float": float, "int": int, "str": str}[spec[key]]
        kwargs[key] = _convert(section, key, raw, typ)
    return cls(**kwargs)


def parse_config(path: str | None) -> RunConfig:
    """Load a config file; None returns the built-in defaults."""
    if path is None:
        return RunConfig()
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys carry unit suffixes with meaningful case
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} not found or unreadable")

    known_sections = {"parameters", "noise", *(_SIMPLE_SECTIONS)}
    for section in parser.sections():
        if section not in known_sections:
            raise ConfigError(f"unknown section [{section}]")

    if not parser.has_section("parameters"):
        raise ConfigError("section [parameters] is required in a config file")
    items = dict(parser.items("parameters"))
    for required in _REQUIRED_PARAM_KEYS:
        if required not in items:
            raise ConfigError(f"missing required key {required!r} in [parameters]")
    kwargs = {}
    for key, raw in items.items():
        if key not in _PARAM_KEYS:
            raise ConfigError(f"unknown key {key!r} in section [parameters]")
        typ, target, scale = _PARAM_KEYS[key]
        value = _convert("parameters", key, raw, typ)
        kwargs[target] = value * scale if scale is not None and typ is float else value
    try:
        parameters = ParameterSet(**kwargs)
    except Exception as exc:
        raise ConfigError(f"invalid [parameters]: {exc}") from exc

    noise_kwargs = {}
    if parser.has_section("noise"):
        for key, raw in parser.items("noise"):
            if key not in _NOISE_KEYS:
                raise ConfigError(f"unknown key {key!r} in section [noise]")
            typ, target, scale = _NOISE_KEYS[key]
            value = _convert("noise", key, raw, typ)
            noise_kwargs[target] = value * scale if scale is not None else value
    try:
        noise = NoiseModel(**noise_kwargs)
    except Exception as exc:
        raise ConfigError(f"invalid [noise]: {exc}") from exc

    others = {}
    for section, cls in _SIMPLE_SECTIONS.items():
        if parser.has_section(section):
            try:
                others[section] = _load_simple(section, cls, dict(parser.items(section)))
            except ConfigError:
                raise
            except Exception as exc:
                raise ConfigError(f"invalid [{section}]: {exc}") from exc
        else:
            others[section] = cls()

    return RunConfig(
        parameters=parameters,
        noise=noise,
        trap=others["trap"],
        hydrogen=others["hydrogen"],
        echo=others["echo"],
        sensitivity=others["sensitivity"],
        output=others["output"],
    )
