"""Electrostatics of one trap cell and magnetostatics of the bias wire.

The cell is a "+" shaped electrode at +V crossed by a guard frame at -V,
both made of wires with square cross-section, lying in the plane z = -h
below the helium surface. The Laplace problem is solved by red-black SOR
on a graded rectilinear grid. An interior cell of the lattice is modeled
with mirror (Neumann) boundaries on the lattice symmetry planes and a
grounded substrate plane a short distance below the wires; the far
boundary above is held at zero several cell lengths away.

Sign convention: the solver returns the electrostatic potential phi.
The trap coefficients quoted for the electron are those of the
potential energy per unit charge, i.e. the fit of -phi; use
``QuadrupoleFit.electron_convention`` for that form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import DEFAULT_CONSTANTS, TWO_PI, PhysicalConstants
from .errors import InvalidParameterError, SolverConvergenceError

UM = 1e-6


@dataclass(frozen=True)
class Box:
    """Axis-aligned conductor held at a fixed voltage. Bounds in m."""

    x0: float
    x1: float
    y0: float
    y1: float
    z0: float
    z1: float
    voltage: float

    def overlaps(self, other: "Box") -> bool:
        return (
            self.x0 < other.x1 and other.x0 < self.x1
            and self.y0 < other.y1 and other.y0 < self.y1
            and self.z0 < other.z1 and other.z0 < self.z1
        )


@dataclass(frozen=True)
class ElectrodeGeometry:
    """Electrode boxes of one cell plus the vertical layout.

    ``cell_half`` is the distance from the cell center to the lattice
    mirror plane; ``ground_z`` is the grounded substrate plane (None for
    an isolated structure).
    """

    boxes: tuple[Box, ...]
    cell_half: float
    ground_z: float | None = None

    def __post_init__(self):
        for i, a in enumerate(self.boxes):
            for b in self.boxes[i + 1:]:
                if a.voltage != b.voltage and a.overlaps(b):
                    raise InvalidParameterError(
                        "electrode boxes at different voltages overlap"
                    )
        if self.ground_z is not None and any(b.z0 < self.ground_z for b in self.boxes):
            raise InvalidParameterError("electrode box extends below the ground plane")

    def is_mirror_symmetric(self, tol: float = 1e-12) -> bool:
        """True when the box set maps onto itself under x -> -x and y -> -y."""

        def canon(b: Box):
            return (round(b.x0 / tol), round(b.x1 / tol), round(b.y0 / tol),
                    round(b.y1 / tol), round(b.z0 / tol), round(b.z1 / tol), b.voltage)

        have = {canon(b) for b in self.boxes}
        for b in self.boxes:
            mx = replace(b, x0=-b.x1, x1=-b.x0)
            my = replace(b, y0=-b.y1, y1=-b.y0)
            if canon(mx) not in have or canon(my) not in have:
                return False
        return True


def cross_cell(
    l: float = 100 * UM,
    d: float = 1 * UM,
    h: float = 5 * UM,
    v_plus: float = 1.0,
    v_minus: float = -1.0,
    gap: float = 2 * UM,
    insulator: float = 0.5 * UM,
    wire_plane: str = "center",
) -> ElectrodeGeometry:
    """Default interior cell: "+" electrode at v_plus, guard frame at v_minus.

    ``wire_plane`` places the wire cross-section relative to z = -h:
    "center" (default), "below" (tops at -h) or "above" (bottoms at -h).
    The grounded substrate sits ``insulator`` below the wire bottoms.
    """
    half = l / 2.0
    if wire_plane == "center":
        z1, z0 = -h + d / 2.0, -h - d / 2.0
    elif wire_plane == "below":
        z1, z0 = -h, -h - d
    elif wire_plane == "above":
        z1, z0 = -h + d, -h
    else:
        raise InvalidParameterError(f"unknown wire_plane {wire_plane!r}")
    arm = half - gap
    boxes = (
        Box(-arm, arm, -d / 2, d / 2, z0, z1, v_plus),       # arm along x
        Box(-d / 2, d / 2, -arm, arm, z0, z1, v_plus),       # arm along y
        Box(half - d / 2, half + d / 2, -half - d / 2, half + d / 2, z0, z1, v_minus),
        Box(-half - d / 2, -half + d / 2, -half - d / 2, half + d / 2, z0, z1, v_minus),
        Box(-half - d / 2, half + d / 2, half - d / 2, half + d / 2, z0, z1, v_minus),
        Box(-half - d / 2, half + d / 2, -half - d / 2, -half + d / 2, z0, z1, v_minus),
    )
    return ElectrodeGeometry(boxes=boxes, cell_half=half, ground_z=z0 - insulator)


@dataclass(frozen=True)
class SolverOptions:
    fine_step: float = 0.5 * UM     # must resolve the wire edge d with >= 2 cells
    coarse_step: float = 1.5 * UM
    stretch_ratio: float = 1.35
    far_factor: float = 3.0         # zero plane at far_factor * (2 cell_half) above
    tol: float = 1e-7               # max SOR update (V)
    max_sweeps: int = 60000
    omega: float = 1.94


def _segment_axis(segments) -> np.ndarray:
    pts = [segments[0][0]]
    for a, b, s in segments:
        if b - a < 1e-15:
            continue
        n = max(1, int(round((b - a) / s)))
        step = (b - a) / n
        for k in range(1, n + 1):
            pts.append(a + k * step)
    return np.array(pts)


def _stretched_tail(start: float, first_step: float, ratio: float, far: float) -> list[float]:
    pts = []
    pos, step = start, first_step
    while pos < far:
        step *= ratio
        pos = min(pos + step, far)
        pts.append(pos)
    return pts


def quadrant_axes(geom: ElectrodeGeometry, opts: SolverOptions = SolverOptions()):
    """Graded axes for a quadrant solve of the default cell layout.

    Fine spacing near the cell center (fit region and crossing wires) and
    near the frame; coarser in between; geometric stretch above the cell
    up to the far zero plane. The vertical axis ends at the ground plane
    when one is present.
    """
    half = geom.cell_half
    fs, cs = opts.fine_step, opts.coarse_step
    inner = min(16 * fs, half)
    frame_band = max(inner, half - 12 * fs)
    xy = _segment_axis([
        (0.0, inner, fs),
        (inner, frame_band, cs),
        (frame_band, half, fs),
    ])
    z_bot = min(b.z0 for b in geom.boxes)
    far = opts.far_factor * 2.0 * half
    zp = _segment_axis([
        (0.0, 12 * fs, fs),
        (12 * fs, 20 * fs, 2 * fs),
        (20 * fs, 36 * fs, 4 * fs),
    ])
    zp = np.concatenate([zp, _stretched_tail(zp[-1], 4 * fs, opts.stretch_ratio, far)])
    if geom.ground_z is not None:
        zm = _segment_axis([(geom.ground_z, 0.0, fs)])
    else:
        zm_lo = _segment_axis([(0.0, -z_bot + 12 * fs, fs)])
        tail = _stretched_tail(zm_lo[-1], cs, opts.stretch_ratio, far)
        zm = -np.concatenate([zm_lo, tail])[::-1]
    z = np.unique(np.concatenate([zm, zp]))
    return xy, xy.copy(), z


@dataclass
class FieldMap:
    """Sampled potential on a rectilinear grid with fixed-node bookkeeping."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    phi: np.ndarray                 # (Nx, Ny, Nz) V
    fixed: np.ndarray               # boolean mask of Dirichlet nodes
    mirror_x: bool
    mirror_y: bool
    sweeps: int = 0
    final_update: float = math.nan

    def mirrored_full(self) -> "FieldMap":
        """Expand a quadrant solve (x, y >= 0) to the full symmetric cell."""
        if not (self.mirror_x and self.mirror_y):
            return self

        def unfold(axis_vals):
            return np.concatenate([-axis_vals[::-1][:-1], axis_vals])

        phi = np.concatenate([self.phi[::-1][:-1], self.phi], axis=0)
        phi = np.concatenate([phi[:, ::-1][:, :-1], phi], axis=1)
        fixed = np.concatenate([self.fixed[::-1][:-1], self.fixed], axis=0)
        fixed = np.concatenate([fixed[:, ::-1][:, :-1], fixed], axis=1)
        return FieldMap(
            x=unfold(self.x), y=unfold(self.y), z=self.z.copy(),
            phi=phi, fixed=fixed, mirror_x=False, mirror_y=False,
            sweeps=self.sweeps, final_update=self.final_update,
        )


def _axis_coefficients(a: np.ndarray, mirror_lo: bool, mirror_hi: bool):
    ha = np.diff(a)
    cw = np.zeros(len(a))
    ce = np.zeros(len(a))
    cw[1:-1] = 2.0 / (ha[:-1] * (ha[:-1] + ha[1:]))
    ce[1:-1] = 2.0 / (ha[1:] * (ha[:-1] + ha[1:]))
    if mirror_lo:
        ce[0] = 2.0 / ha[0] ** 2
    if mirror_hi:
        cw[-1] = 2.0 / ha[-1] ** 2
    return cw, ce


def _electrode_masks(geom, x, y, z):
    phi0 = np.zeros((len(x), len(y), len(z)))
    fixed = np.zeros_like(phi0, dtype=bool)
    eps = 1e-12
    for b in geom.boxes:
        m = (
            ((x >= b.x0 - eps) & (x <= b.x1 + eps))[:, None, None]
            & ((y >= b.y0 - eps) & (y <= b.y1 + eps))[None, :, None]
            & ((z >= b.z0 - eps) & (z <= b.z1 + eps))[None, None, :]
        )
        phi0[m] = b.voltage
        fixed |= m
    return phi0, fixed


def solve_laplace(
    geom: ElectrodeGeometry,
    axes=None,
    opts: SolverOptions = SolverOptions(),
    symmetry: str = "quadrant",
) -> FieldMap:
    """Relax the cell potential to the requested tolerance.

    ``symmetry="quadrant"`` solves x, y >= 0 with mirror boundaries at the
    cell center planes and at the lattice planes x, y = cell_half (the
    interior-cell model); ``symmetry="none"`` solves the axes as given
    with zero Dirichlet boundaries on all outer faces.
    """
    if symmetry == "quadrant" and not geom.is_mirror_symmetric():
        raise InvalidParameterError("quadrant solve requires a mirror-symmetric geometry")
    if axes is None:
        if symmetry != "quadrant":
            raise InvalidParameterError("explicit axes are required for a full-domain solve")
        axes = quadrant_axes(geom, opts)
    x, y, z = (np.asarray(a, dtype=float) for a in axes)
    for a in (x, y, z):
        if np.any(np.diff(a) <= 0.0):
            raise InvalidParameterError("axes must be strictly increasing")
    d_min = min(b.x1 - b.x0 for b in geom.boxes)
    if opts.fine_step > d_min / 2.0 + 1e-15:
        raise InvalidParameterError("fine_step must resolve the wire edge with >= 2 cells")

    mirror = symmetry == "quadrant"
    phi, fixed = _electrode_masks(geom, x, y, z)
    # outer faces: Dirichlet zero unless mirrored
    if not mirror:
        fixed[0, :, :] = fixed[-1, :, :] = True
        fixed[:, 0, :] = fixed[:, -1, :] = True
    fixed[:, :, 0] = fixed[:, :, -1] = True

    cxw, cxe = _axis_coefficients(x, mirror, mirror)
    cyw, cye = _axis_coefficients(y, mirror, mirror)
    czw, cze = _axis_coefficients(z, False, False)
    ct = (cxw + cxe)[:, None, None] + (cyw + cye)[None, :, None] + (czw + cze)[None, None, :]
    ct[ct == 0.0] = 1.0

    ii, jj, kk = np.meshgrid(
        np.arange(len(x)), np.arange(len(y)), np.arange(len(z)), indexing="ij"
    )
    parity = ((ii + jj + kk) % 2).astype(bool)
    free = ~fixed
    masks = (free & parity, free & ~parity)

    cxw3, cxe3 = cxw[:, None, None], cxe[:, None, None]
    cyw3, cye3 = cyw[None, :, None], cye[None, :, None]
    czw3, cze3 = czw[None, None, :], cze[None, None, :]

    def neighbor_sum(f):
        s = np.zeros_like(f)
        s[1:-1, :, :] += cxw3[1:-1] * f[:-2, :, :] + cxe3[1:-1] * f[2:, :, :]
        s[:, 1:-1, :] += cyw3[:, 1:-1] * f[:, :-2, :] + cye3[:, 1:-1] * f[:, 2:, :]
        s[:, :, 1:-1] += czw3[:, :, 1:-1] * f[:, :, :-2] + cze3[:, :, 1:-1] * f[:, :, 2:]
        if mirror:
            s[0, :, :] += cxe[0] * f[1, :, :]
            s[-1, :, :] += cxw[-1] * f[-2, :, :]
            s[:, 0, :] += cye[0] * f[:, 1, :]
            s[:, -1, :] += cyw[-1] * f[:, -2, :]
        return s

    def half_sweep(mask):
        new = neighbor_sum(phi) / ct
        delta = opts.omega * (new - phi)
        phi[mask] += delta[mask]
        return float(np.abs(delta[mask]).max()) if mask.any() else 0.0

    update = math.inf
    for sweep in range(1, opts.max_sweeps + 1):
        update = max(half_sweep(masks[0]), half_sweep(masks[1]))
        if update < opts.tol:
            break
    else:
        raise SolverConvergenceError(
            f"SOR did not reach {opts.tol:g} V in {opts.max_sweeps} sweeps "
            f"(last update {update:.3e} V)",
            residual=update,
            sweeps=opts.max_sweeps,
        )
    return FieldMap(
        x=x, y=y, z=z, phi=phi, fixed=fixed,
        mirror_x=mirror, mirror_y=mirror,
        sweeps=sweep, final_update=update,
    )


def relaxation_residual(fmap: FieldMap, geom: ElectrodeGeometry | None = None) -> float:
    """Max Gauss-Seidel update over free nodes, in V (solver's own metric)."""
    mirror = fmap.mirror_x
    cxw, cxe = _axis_coefficients(fmap.x, mirror, mirror)
    cyw, cye = _axis_coefficients(fmap.y, fmap.mirror_y, fmap.mirror_y)
    czw, cze = _axis_coefficients(fmap.z, False, False)
    ct = (cxw + cxe)[:, None, None] + (cyw + cye)[None, :, None] + (czw + cze)[None, None, :]
    ct[ct == 0.0] = 1.0
    f = fmap.phi
    s = np.zeros_like(f)
    s[1:-1, :, :] += cxw[1:-1, None, None] * f[:-2] + cxe[1:-1, None, None] * f[2:]
    s[:, 1:-1, :] += cyw[None, 1:-1, None] * f[:, :-2] + cye[None, 1:-1, None] * f[:, 2:]
    s[:, :, 1:-1] += czw[None, None, 1:-1] * f[:, :, :-2] + cze[None, None, 1:-1] * f[:, :, 2:]
    if mirror:
        s[0, :, :] += cxe[0] * f[1, :, :]
        s[-1, :, :] += cxw[-1] * f[-2, :, :]
    if fmap.mirror_y:
        s[:, 0, :] += cye[0] * f[:, 1, :]
        s[:, -1, :] += cyw[-1] * f[:, -2, :]
    resid = np.abs(s / ct - f)
    return float(resid[~fmap.fixed].max())


MONOMIALS = ("1", "x", "y", "z", "x^2", "y^2", "z^2", "xy", "xz", "yz")


@dataclass(frozen=True)
class QuadrupoleFit:
    """Second-order Taylor coefficients of the sampled potential.

    Convention "potential" fits phi itself; "electron" fits -phi, the
    potential energy per unit (positive) charge of the trapped electron.
    """

    v0: float
    e_x: float
    e_y: float
    e_z: float
    q_xx: float
    q_yy: float
    q_zz: float
    q_xy: float
    q_xz: float
    q_yz: float
    residual_rms: float
    radius: float
    n_samples: int
    convention: str = "potential"

    def electron_convention(self) -> "QuadrupoleFit":
        if self.convention == "electron":
            return self
        return replace(
            self,
            v0=-self.v0, e_x=-self.e_x, e_y=-self.e_y, e_z=-self.e_z,
            q_xx=-self.q_xx, q_yy=-self.q_yy, q_zz=-self.q_zz,
            q_xy=-self.q_xy, q_xz=-self.q_xz, q_yz=-self.q_yz,
            convention="electron",
        )

    @property
    def trace_ratio(self) -> float:
        return abs(self.q_xx + self.q_yy + self.q_zz) / abs(self.q_zz)

    @property
    def cross_term_ratio(self) -> float:
        dominant = max(abs(self.q_xx), abs(self.q_yy), abs(self.q_zz))
        linear = max(abs(self.e_x), abs(self.e_y)) / max(abs(self.e_z), 1e-300)
        cross = max(abs(self.q_xy), abs(self.q_xz), abs(self.q_yz)) / dominant
        return max(linear, cross)


def fit_quadrupole(
    fmap: FieldMap,
    center=(0.0, 0.0, 0.0),
    radius: float = 3 * UM,
    z_half: float = 2.5 * UM,
    debias: bool = True,
) -> QuadrupoleFit:
    """Least-squares fit of the ten quadratic monomials near ``center``.

    Samples all free grid nodes inside the ball of ``radius`` whose height
    relative to the center is within ``z_half``; the film region below the
    surface is included since the helium dielectric is neglected.

    With ``debias`` (default) the regression carries the symmetric cubic
    and quartic monomials as nuisance columns, which removes the
    window-scale bias of the quadratic coefficients; only the ten
    quadratic-order coefficients are reported either way.
    """
    full = fmap.mirrored_full()
    cx, cy, cz = center
    mx = np.abs(full.x - cx) <= radius
    my = np.abs(full.y - cy) <= radius
    mz = np.abs(full.z - cz) <= z_half
    xs, ys, zs = full.x[mx], full.y[my], full.z[mz]
    gx, gy, gz = np.meshgrid(xs - cx, ys - cy, zs - cz, indexing="ij")
    ball = gx**2 + gy**2 + gz**2 <= radius**2
    sub_fixed = full.fixed[np.ix_(mx, my, mz)]
    keep = ball & ~sub_fixed
    X, Y, Z = gx[keep], gy[keep], gz[keep]
    vals = full.phi[np.ix_(mx, my, mz)][keep]
    columns = [np.ones_like(X), X, Y, Z, X * X, Y * Y, Z * Z, X * Y, X * Z, Y * Z]
    if debias:
        columns += [
            Z**3, X * X * Z, Y * Y * Z,
            X**4, Y**4, Z**4, X * X * Y * Y, X * X * Z * Z, Y * Y * Z * Z,
        ]
    if keep.sum() < 3 * len(columns):
        raise InvalidParameterError(
            f"only {int(keep.sum())} samples in the fit region: degenerate fit"
        )
    design = np.stack(columns, axis=1)
    scale = np.abs(design).max(axis=0)
    scale[scale == 0.0] = 1.0
    coef, *_ = np.linalg.lstsq(design / scale, vals, rcond=None)
    coef = coef / scale
    resid = vals - design @ coef
    return QuadrupoleFit(
        v0=coef[0], e_x=coef[1], e_y=coef[2], e_z=coef[3],
        q_xx=coef[4], q_yy=coef[5], q_zz=coef[6],
        q_xy=coef[7], q_xz=coef[8], q_yz=coef[9],
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        radius=radius,
        n_samples=int(keep.sum()),
    )


def trap_fit(
    geom: ElectrodeGeometry | None = None,
    opts: SolverOptions = SolverOptions(),
    radius: float = 3 * UM,
    z_half: float = 2.5 * UM,
) -> tuple[QuadrupoleFit, FieldMap]:
    """Solve the default cell and return the electron-convention fit."""
    geom = cross_cell() if geom is None else geom
    fmap = solve_laplace(geom, opts=opts, symmetry="quadrant")
    fit = fit_quadrupole(fmap, radius=radius, z_half=z_half).electron_convention()
    return fit, fmap


# --- bias-wire magnetostatics -------------------------------------------------


def wire_field(
    i_dc: float,
    h: float,
    x,
    z,
    form: str = "exact",
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
):
    """Field (B_x, B_z) of the y-directed wire a depth h below the surface.

    "exact" is the full line-current field; "linear" its first-order
    expansion -B0[(1 - z/h) e_x - (x/h) e_z] around the trap center.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    b0 = consts.mu0 * i_dc / (TWO_PI * h)
    if form == "linear":
        bx = -b0 * (1.0 - z / h)
        bz = b0 * x / h
        return bx, bz
    if form != "exact":
        raise InvalidParameterError(f"unknown field form {form!r}")
    denom = x**2 + (z + h) ** 2
    if np.any(denom == 0.0):
        raise InvalidParameterError("field evaluated on the wire axis")
    pref = consts.mu0 * i_dc / TWO_PI
    return -pref * (z + h) / denom, pref * x / denom


def wire_vector_potential(
    i_dc: float,
    h: float,
    x,
    z,
    form: str = "exact",
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
):
    """y-component of the wire vector potential (Coulomb gauge, zero at origin)."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    b0 = consts.mu0 * i_dc / (TWO_PI * h)
    if form == "quadratic":
        return b0 * (z - z**2 / (2.0 * h) + x**2 / (2.0 * h))
    if form != "exact":
        raise InvalidParameterError(f"unknown potential form {form!r}")
    arg = x**2 / h**2 + (z / h + 1.0) ** 2
    if np.any(arg == 0.0):
        raise InvalidParameterError("potential evaluated on the wire axis")
    return 0.5 * h * b0 * np.log(arg)


def neighbor_cancellation(
    i_dc: float,
    h: float,
    l: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> dict:
    """Residual field of the two neighboring wires at +-l relative to |B(0)|."""
    bx_p, bz_p = wire_field(i_dc, h, l, 0.0, "exact", consts)
    bx_m, bz_m = wire_field(i_dc, h, -l, 0.0, "exact", consts)
    bx0, bz0 = wire_field(i_dc, h, 0.0, 0.0, "exact", consts)
    resid = math.hypot(float(bx_p + bx_m), float(bz_p + bz_m))
    return {
        "residual_T": resid,
        "center_T": math.hypot(float(bx0), float(bz0)),
        "ratio": resid / math.hypot(float(bx0), float(bz0)),
    }


def maxwell_checks(
    i_dc: float,
    h: float,
    half_extent: float | None = None,
    n: int = 21,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> dict:
    """Finite-difference divergence and curl of both field forms.

    Sampled on a square patch of half-width ``half_extent`` (default
    h/250, small enough that second-order stencil truncation sits below
    1e-6) around the trap center, normalized by |B(0)|/h. The truncated
    linear form is divergence- and curl-free identically; the exact form
    must vanish to finite-difference accuracy.
    """
    if half_extent is None:
        half_extent = h / 250.0
    xs = np.linspace(-half_extent, half_extent, n)
    zs = np.linspace(-half_extent, half_extent, n)
    step = xs[1] - xs[0]
    gx, gz = np.meshgrid(xs, zs, indexing="ij")
    scale = consts.mu0 * i_dc / (TWO_PI * h) / h
    report = {}
    for form in ("exact", "linear"):
        bx, bz = wire_field(i_dc, h, gx, gz, form, consts)
        div = (bx[2:, 1:-1] - bx[:-2, 1:-1]) / (2 * step) + (
            bz[1:-1, 2:] - bz[1:-1, :-2]
        ) / (2 * step)
        curl_y = (bx[1:-1, 2:] - bx[1:-1, :-2]) / (2 * step) - (
            bz[2:, 1:-1] - bz[:-2, 1:-1]
        ) / (2 * step)
        report[form] = {
            "max_div": float(np.abs(div).max()) / scale,
            "max_curl": float(np.abs(curl_y).max()) / scale,
        }
    return report


def curl_check_vector_potential(
    i_dc: float,
    h: float,
    half_extent: float | None = None,
    n: int = 41,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> float:
    """Max relative deviation of the finite-difference curl of A from B."""
    if half_extent is None:
        half_extent = h / 20.0
    xs = np.linspace(-half_extent, half_extent, n)
    zs = np.linspace(-half_extent, half_extent, n)
    step = xs[1] - xs[0]
    gx, gz = np.meshgrid(xs, zs, indexing="ij")
    ay = wire_vector_potential(i_dc, h, gx, gz, "exact", consts)
    # curl for A = A_y e_y: B_x = -dA_y/dz, B_z = dA_y/dx
    bx_fd = -(ay[1:-1, 2:] - ay[1:-1, :-2]) / (2 * step)
    bz_fd = (ay[2:, 1:-1] - ay[:-2, 1:-1]) / (2 * step)
    bx, bz = wire_field(i_dc, h, gx[1:-1, 1:-1], gz[1:-1, 1:-1], "exact", consts)
    mag = np.hypot(bx, bz)
    return float(max(np.abs(bx_fd - bx).max(), np.abs(bz_fd - bz).max()) / mag.max())
