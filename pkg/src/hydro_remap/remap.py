"""
Remap engines: project the Lagrangian state back onto the Eulerian grid.

Three engines share the flux bookkeeping below:

* AD: one face pass per direction, X-Y on odd steps and Y-X on even steps.
* Direct: X and Y face fluxes computed from the same start state, one pass.
* DirectCF: trapezoid face fluxes plus corner fluxes at every node.

Cell quantities are remapped as partial masses and partial energies
``m_a e_a`` per material (one material for single-material runs). Node
velocities are remapped on the dual grid with mass fluxes averaged from the
four adjacent primal fluxes.

Sign conventions: a face flux is positive along +x (+y); the Lagrangian
volume of a cell is ``dx dy - F_left + F_right - F_bottom + F_top`` and a
corner flux adds to its donor and removes from its receiver.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from loguru import logger

from .errors import (
    CflViolationError,
    NegativeMassError,
    TangledCellError,
    VolumeFractionError,
    first_index,
)
from .geometry import rect_halfplane_area
from .interface import FRACTION_SNAP, place_interfaces, reconstruct_interfaces, snap_pure, youngs_normals
from .mesh_state import (
    GHOST,
    apply_wall_velocity,
    eos_pressure,
    nodal_masses,
    pad_cells,
    pad_nodes,
    padded_cell_centers,
    sync_periodic_nodes,
)
from .models import (
    Axis,
    BoolArray,
    CornerScheme,
    EosModel,
    FloatArray,
    FluxSet,
    LagrangianState,
    MaterialFields,
    Mesh,
    ReconConfig,
    RemapDiagnostics,
    RemapKind,
    State,
)
from .reconstruct import (
    IntArray,
    StencilGeometry,
    corner_values,
    face_values,
    window_all,
)

# Largest admissible share of a cell volume carried by one flux.
CFL_FLUX_LIMIT = 0.9
FRACTION_TOL = 1e-10
FRACTION_WARN = 1e-12


# ============================================================================
# Volume fluxes
# ============================================================================


def _check_flux(flux: FloatArray, mesh: Mesh, what: str, step: int | None) -> None:
    bad = np.abs(flux) > CFL_FLUX_LIMIT * mesh.cell_area
    if np.any(bad):
        raise CflViolationError(
            f"{what} volume flux {float(np.max(np.abs(flux))):.6g} exceeds "
            f"{CFL_FLUX_LIMIT} of the cell volume {mesh.cell_area:.6g}",
            cell=first_index(bad),
            step=step,
        )


def ad_face_fluxes(
    ux_half: FloatArray,
    uy_half: FloatArray,
    dt: float,
    mesh: Mesh,
    axis: Axis,
    *,
    step: int | None = None,
) -> FloatArray:
    """
    Face volume fluxes ``1/2 (u_a + u_b) dt dy`` from the two face nodes.

    X faces have shape ``(ny, nx + 1)``, Y faces ``(ny + 1, nx)``.

    Raises:
        CflViolationError: A flux exceeds 0.9 of the cell volume
    """
    if axis is Axis.X:
        flux = 0.5 * (ux_half[:-1, :] + ux_half[1:, :]) * dt * mesh.dy
    else:
        flux = 0.5 * (uy_half[:, :-1] + uy_half[:, 1:]) * dt * mesh.dx
    _check_flux(flux, mesh, f"{axis.value.upper()}-face", step)
    return np.asarray(flux)


def _ad_boxes(flux: FloatArray, mesh: Mesh, axis: Axis) -> FloatArray:
    xn, yn = mesh.node_coords()
    if axis is Axis.X:
        x_face = xn[:-1, :]
        return np.stack([x_face, x_face + flux / mesh.dy, yn[:-1, :], yn[1:, :]])
    y_face = yn[:, :-1]
    return np.stack([xn[:, :-1], xn[:, 1:], y_face, y_face + flux / mesh.dx])


def ad_flux_set(
    ux_half: FloatArray,
    uy_half: FloatArray,
    dt: float,
    mesh: Mesh,
    axis: Axis,
    *,
    step: int | None = None,
) -> FluxSet:
    """Face fluxes of one alternate-direction pass, with their swept boxes."""
    flux = ad_face_fluxes(ux_half, uy_half, dt, mesh, axis, step=step)
    if axis is Axis.X:
        return FluxSet(fx=flux, fx_box=_ad_boxes(flux, mesh, axis))
    return FluxSet(fy=flux, fy_box=_ad_boxes(flux, mesh, axis))


def direct_flux_set(
    ux_half: FloatArray,
    uy_half: FloatArray,
    dt: float,
    mesh: Mesh,
    *,
    step: int | None = None,
) -> FluxSet:
    """X and Y face fluxes computed together from the start state."""
    fx = ad_face_fluxes(ux_half, uy_half, dt, mesh, Axis.X, step=step)
    fy = ad_face_fluxes(ux_half, uy_half, dt, mesh, Axis.Y, step=step)
    return FluxSet(
        fx=fx,
        fy=fy,
        fx_box=_ad_boxes(fx, mesh, Axis.X),
        fy_box=_ad_boxes(fy, mesh, Axis.Y),
    )


def _cf_faces_x(
    ux_half: FloatArray, uy_half: FloatArray, dt: float, mesh: Mesh
) -> tuple[FloatArray, FloatArray]:
    """Trapezoid X-face fluxes and boxes; ``p-`` is node ``(j, I)``, ``p+`` node ``(j + 1, I)``."""
    xn, yn = mesh.node_coords()
    dxn = dt * ux_half
    dyn = dt * uy_half
    x_face = xn[:-1, :]
    y_lo = yn[:-1, :]
    y_hi = yn[1:, :]
    x_minus, y_minus = x_face + dxn[:-1, :], y_lo + dyn[:-1, :]
    x_plus, y_plus = x_face + dxn[1:, :], y_hi + dyn[1:, :]
    yf_minus = y_lo + np.maximum(0.0, dyn[:-1, :])
    yf_plus = y_hi + np.minimum(0.0, dyn[1:, :])
    # Lagrangian face line through the two end-of-step node positions
    slope = (x_plus - x_minus) / (y_plus - y_minus)
    xf_minus = x_minus + (yf_minus - y_minus) * slope - x_face
    xf_plus = x_minus + (yf_plus - y_minus) * slope - x_face
    is_open = yf_plus > yf_minus
    x_bar = np.where(is_open, 0.5 * (xf_minus + xf_plus), 0.0)
    flux = np.where(is_open, x_bar * (yf_plus - yf_minus), 0.0)
    box = np.stack([x_face, x_face + x_bar, yf_minus, np.where(is_open, yf_plus, yf_minus)])
    return np.asarray(flux), box


def _transpose_box(box: FloatArray) -> FloatArray:
    return np.stack([box[2].T, box[3].T, box[0].T, box[1].T])


def _cf_faces(
    ux_half: FloatArray, uy_half: FloatArray, dt: float, mesh: Mesh, axis: Axis
) -> tuple[FloatArray, FloatArray]:
    if axis is Axis.X:
        return _cf_faces_x(ux_half, uy_half, dt, mesh)
    flux_t, box_t = _cf_faces_x(uy_half.T, ux_half.T, dt, mesh.transposed())
    return flux_t.T, _transpose_box(box_t)


def cf_face_flux(
    ux_half: FloatArray,
    uy_half: FloatArray,
    dt: float,
    mesh: Mesh,
    axis: Axis,
    *,
    step: int | None = None,
) -> FloatArray:
    """
    Face fluxes of the corner-flux remap: the rectangle approximating the
    trapezoid swept by a face, minus the corner windows.

    Offsets are measured from the Eulerian face line, so static nodes give
    zero and a uniform ``(c, 0)`` motion gives ``c dt dy``.
    """
    flux, _ = _cf_faces(ux_half, uy_half, dt, mesh, axis)
    _check_flux(flux, mesh, f"{axis.value.upper()}-face", step)
    return flux


def cf_corner_flux(
    ux_half: FloatArray | float, uy_half: FloatArray | float, dt: float
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """
    Corner volume ``|dx_p dy_p|`` and the sign pair ``(sx, sy)`` of the node motion.

    Zero components get sign +1; the corner flux is zero there anyway.
    """
    dx = dt * np.asarray(ux_half, dtype=float)
    dy = dt * np.asarray(uy_half, dtype=float)
    sx = np.where(dx < 0.0, -1, 1)
    sy = np.where(dy < 0.0, -1, 1)
    return np.asarray(np.abs(dx * dy)), sx, sy


def cf_flux_set(
    ux_half: FloatArray,
    uy_half: FloatArray,
    dt: float,
    mesh: Mesh,
    *,
    step: int | None = None,
) -> FluxSet:
    """Trapezoid face fluxes and corner fluxes with their swept boxes."""
    fx, fx_box = _cf_faces(ux_half, uy_half, dt, mesh, Axis.X)
    fy, fy_box = _cf_faces(ux_half, uy_half, dt, mesh, Axis.Y)
    _check_flux(fx, mesh, "X-face", step)
    _check_flux(fy, mesh, "Y-face", step)
    corner, sx, sy = cf_corner_flux(ux_half, uy_half, dt)
    _check_flux(corner, mesh, "Corner", step)
    xn, yn = mesh.node_coords()
    kdx = dt * ux_half
    kdy = dt * uy_half
    return FluxSet(
        fx=fx,
        fy=fy,
        corner=corner,
        sx=sx,
        sy=sy,
        kdx=kdx,
        kdy=kdy,
        fx_box=fx_box,
        fy_box=fy_box,
        corner_box=np.stack([xn, xn + kdx, yn, yn + kdy]),
    )


# ============================================================================
# Flux bookkeeping
# ============================================================================


def _net_faces(fx: FloatArray | None, fy: FloatArray | None, shape: tuple[int, int]) -> FloatArray:
    net = np.zeros(shape)
    if fx is not None:
        net += fx[:, :-1] - fx[:, 1:]
    if fy is not None:
        net += fy[:-1, :] - fy[1:, :]
    return net


def _corner_cells(
    mesh: Mesh, sx: FloatArray, sy: FloatArray
) -> tuple[IntArray, IntArray, IntArray, IntArray]:
    """Donor and receiver cell indices (unpadded, unwrapped) of every corner flux."""
    jn, in_ = np.indices(mesh.node_shape)
    dj = jn - (sy > 0)
    di = in_ - (sx > 0)
    return dj, di, dj + sy, di + sx


def _net_corners(mesh: Mesh, corner: FloatArray, sx: FloatArray, sy: FloatArray) -> FloatArray:
    """Net corner inflow per cell; only physical (unique) nodes contribute."""
    rows, cols = mesh.unique_nodes()
    dj, di, rj, ri = _corner_cells(mesh, sx, sy)
    amount = corner[rows, cols]
    net = np.zeros(mesh.shape)
    np.add.at(net, (dj[rows, cols] % mesh.ny, di[rows, cols] % mesh.nx), -amount)
    np.add.at(net, (rj[rows, cols] % mesh.ny, ri[rows, cols] % mesh.nx), amount)
    return net


def lagrangian_volumes(mesh: Mesh, fluxes: FluxSet) -> FloatArray:
    """Lagrangian cell volumes implied by ``fluxes``: ``dx dy`` minus the net inflow."""
    return np.asarray(mesh.cell_area - _net(mesh, fluxes))


def _net(mesh: Mesh, fluxes: FluxSet) -> FloatArray:
    """Net volume inflow per cell through every flux of ``fluxes``."""
    net = _net_faces(fluxes.fx, fluxes.fy, mesh.shape)
    if fluxes.corner is not None:
        assert fluxes.sx is not None and fluxes.sy is not None
        net += _net_corners(mesh, fluxes.corner, fluxes.sx, fluxes.sy)
    return net


def _face_donors(flux: FloatArray, axis: Axis) -> tuple[IntArray, IntArray]:
    """Padded donor indices of a face flux field."""
    rows, cols = np.indices(flux.shape)
    if axis is Axis.X:
        return rows + GHOST, np.where(flux > 0.0, cols - 1, cols) + GHOST
    return np.where(flux > 0.0, rows - 1, rows) + GHOST, cols + GHOST


def _corner_donors(mesh: Mesh, sx: FloatArray, sy: FloatArray) -> tuple[IntArray, IntArray]:
    dj, di, _, _ = _corner_cells(mesh, sx, sy)
    return dj + GHOST, di + GHOST


def _face_disp(g: StencilGeometry, flux: FloatArray, axis: Axis) -> FloatArray:
    rows, cols = np.indices(flux.shape)
    if axis is Axis.X:
        return g.fdisp_x[rows + GHOST, cols + GHOST]
    return g.fdisp_y[rows + GHOST, cols + GHOST]


def remap_volume_fractions(
    vol_alpha_lag: FloatArray,
    net_alpha: FloatArray,
    mesh: Mesh,
    step: int | None = None,
) -> tuple[FloatArray, float]:
    """
    Projected volume fractions ``k_a = (Vol_a^lag + net_a) / (dx dy)``.

    Returns the fractions, clipped to [0, 1] with ``k_1 = 1 - k_0``, and the
    largest excursion outside [0, 1] before clipping.

    Raises:
        VolumeFractionError: A fraction left [-1e-10, 1 + 1e-10]
    """
    k0 = (vol_alpha_lag[0] + net_alpha[0]) / mesh.cell_area
    excursion = np.maximum(-k0, k0 - 1.0)
    violation = max(0.0, float(np.max(excursion)))
    if violation > FRACTION_TOL:
        raise VolumeFractionError(
            f"Volume fraction out of range by {violation:.3e}",
            cell=first_index(excursion > FRACTION_TOL),
            step=step,
        )
    if violation > FRACTION_WARN:
        logger.warning(f"Volume fraction clipped by {violation:.3e} at step {step}")
    k0 = np.clip(k0, 0.0, 1.0)
    return np.stack([k0, 1.0 - k0]), violation


# ============================================================================
# Working state
# ============================================================================


@dataclass
class _Work:
    """Partial masses, energies and fractions updated pass by pass."""

    mesh: Mesh
    eos: tuple[EosModel, ...]
    mass: FloatArray
    energy: FloatArray
    k: FloatArray
    normal: FloatArray | None
    step: int

    @property
    def multimat(self) -> bool:
        return len(self.eos) == 2

    @classmethod
    def from_lag(cls, lag: LagrangianState) -> _Work:
        mat = lag.materials
        if mat is None:
            return cls(
                mesh=lag.mesh,
                eos=(lag.eos,),
                mass=lag.mass[None].copy(),
                energy=(lag.mass * lag.e)[None],
                k=np.ones((1, *lag.mesh.shape)),
                normal=None,
                step=lag.step,
            )
        return cls(
            mesh=lag.mesh,
            eos=mat.eos,
            mass=mat.mass.copy(),
            energy=mat.mass * mat.e,
            k=mat.k.copy(),
            normal=mat.normal.copy(),
            step=lag.step,
        )

    def total_mass(self) -> FloatArray:
        return np.asarray(np.sum(self.mass, axis=0))


def _proxies(mesh: Mesh, g: StencilGeometry, kind: str) -> FloatArray:
    """
    Padded rectangular proxies ``(x_lo, x_hi, y_lo, y_hi)`` of the Lagrangian cells.

    ``x``: faces moved along x only; ``y``: along y only; ``full``: the
    rectangle through the Lagrangian face midpoints.
    """
    xc, yc = padded_cell_centers(mesh, GHOST)
    x_lo, x_hi = xc - 0.5 * mesh.dx, xc + 0.5 * mesh.dx
    y_lo, y_hi = yc - 0.5 * mesh.dy, yc + 0.5 * mesh.dy
    if kind in ("x", "full"):
        x_lo = x_lo + g.fdisp_x[:, :-1]
        x_hi = x_hi + g.fdisp_x[:, 1:]
    if kind in ("y", "full"):
        y_lo = y_lo + g.fdisp_y[:-1, :]
        y_hi = y_hi + g.fdisp_y[1:, :]
    return np.stack([x_lo, x_hi, y_lo, y_hi])


@dataclass
class _Interfaces:
    """Padded interface data seen by flux donors."""

    k0: FloatArray
    nx: FloatArray
    ny: FloatArray
    cx: FloatArray
    cy: FloatArray
    s: FloatArray

    @classmethod
    def build(cls, work: _Work, normal: FloatArray, g: StencilGeometry, kind: str) -> _Interfaces:
        mesh = work.mesh
        proxy = _proxies(mesh, g, kind)
        k0 = pad_cells(work.k[0], mesh)
        nx = pad_cells(normal[0], mesh, negate_x=True)
        ny = pad_cells(normal[1], mesh, negate_y=True)
        s = place_interfaces(k0, nx, ny, proxy[1] - proxy[0], proxy[3] - proxy[2])
        return cls(
            k0=k0,
            nx=nx,
            ny=ny,
            cx=0.5 * (proxy[0] + proxy[1]),
            cy=0.5 * (proxy[2] + proxy[3]),
            s=s,
        )

    def split(self, flux: FloatArray, box: FloatArray, jd: IntArray, id_: IntArray) -> FloatArray:
        """Material-0 and material-1 shares of ``flux``, stacked on a leading axis."""
        k0 = self.k0[jd, id_]
        mixed = (k0 > 0.0) & (k0 < 1.0)
        area0 = rect_halfplane_area(
            box, self.nx[jd, id_], self.ny[jd, id_], self.cx[jd, id_], self.cy[jd, id_], self.s[jd, id_]
        )
        pure0 = np.where(k0 > 0.5, flux, 0.0)
        share0 = np.where(mixed, np.sign(flux) * np.clip(area0, 0.0, np.abs(flux)), pure0)
        return np.stack([share0, flux - share0])


def _proxy_kind(kind: RemapKind, axis: str) -> str:
    return "full" if kind is RemapKind.DIRECT_CF else axis


def _cap_outflows(
    groups: list[tuple[FloatArray, IntArray, IntArray]],
    vol_alpha_lag: FloatArray,
    mesh: Mesh,
    step: int,
    diagnostics: RemapDiagnostics | None,
) -> None:
    """
    Cap the outflow of each material from each donor at its Lagrangian volume, in place.

    ``groups`` hold (material fluxes over unique sites, padded donor rows, padded donor columns).
    The excess is handed to the other material.
    """
    for alpha in (0, 1):
        outflow = np.zeros(mesh.shape)
        for mat, jd, id_ in groups:
            np.add.at(outflow, ((jd - GHOST) % mesh.ny, (id_ - GHOST) % mesh.nx), np.abs(mat[alpha]))
        over = outflow > vol_alpha_lag[alpha]
        if not np.any(over):
            continue
        ratio = np.where(over, vol_alpha_lag[alpha] / np.where(over, outflow, 1.0), 1.0)
        logger.warning(
            f"Capped material {alpha} outflow in {int(np.sum(over))} donor cell(s) at step {step}"
        )
        if diagnostics is not None:
            diagnostics.capped_outflows += int(np.sum(over))
        for mat, jd, id_ in groups:
            r = ratio[(jd - GHOST) % mesh.ny, (id_ - GHOST) % mesh.nx]
            moved = mat[alpha] * (1.0 - r)
            mat[alpha] -= moved
            mat[1 - alpha] += moved


def _partition(
    work: _Work,
    fluxes: FluxSet,
    g: StencilGeometry,
    kind: RemapKind,
    vol_lag: FloatArray,
    diagnostics: RemapDiagnostics | None = None,
) -> FluxSet:
    """Split every flux between the two materials by intersecting its box with the interface."""
    mesh = work.mesh
    previous = work.normal
    normal = youngs_normals(work.k[1], mesh, previous, step=work.step)
    work.normal = normal
    cache: dict[str, _Interfaces] = {}

    def interfaces(axis: str) -> _Interfaces:
        key = _proxy_kind(kind, axis)
        if key not in cache:
            cache[key] = _Interfaces.build(work, normal, g, key)
        return cache[key]

    out = replace(fluxes)
    groups: list[tuple[FloatArray, IntArray, IntArray]] = []
    rows, cols = mesh.unique_nodes()
    if fluxes.fx is not None:
        assert fluxes.fx_box is not None
        jd, id_ = _face_donors(fluxes.fx, Axis.X)
        out.mat_fx = interfaces("x").split(fluxes.fx, fluxes.fx_box, jd, id_)
        ucols = slice(0, mesh.nx) if mesh.periodic_x else slice(None)
        groups.append((out.mat_fx[:, :, ucols], jd[:, ucols], id_[:, ucols]))
    if fluxes.fy is not None:
        assert fluxes.fy_box is not None
        jd, id_ = _face_donors(fluxes.fy, Axis.Y)
        out.mat_fy = interfaces("y").split(fluxes.fy, fluxes.fy_box, jd, id_)
        urows = slice(0, mesh.ny) if mesh.periodic_y else slice(None)
        groups.append((out.mat_fy[:, urows, :], jd[urows, :], id_[urows, :]))
    if fluxes.corner is not None:
        assert fluxes.sx is not None and fluxes.sy is not None and fluxes.corner_box is not None
        jd, id_ = _corner_donors(mesh, fluxes.sx, fluxes.sy)
        out.mat_corner = interfaces("full").split(fluxes.corner, fluxes.corner_box, jd, id_)
        groups.append((out.mat_corner[:, rows, cols], jd[rows, cols], id_[rows, cols]))

    # Views above are written through; the periodic duplicates are refreshed after capping
    _cap_outflows(groups, work.k * vol_lag, mesh, work.step, diagnostics)
    if out.mat_fx is not None and mesh.periodic_x:
        out.mat_fx[:, :, mesh.nx] = out.mat_fx[:, :, 0]
    if out.mat_fy is not None and mesh.periodic_y:
        out.mat_fy[:, mesh.ny, :] = out.mat_fy[:, 0, :]
    return out


def multimat_partition_fluxes(
    kind: RemapKind,
    lag: LagrangianState,
    fluxes: FluxSet,
    diagnostics: RemapDiagnostics | None = None,
) -> FluxSet:
    """
    Per-material partition of ``fluxes`` for a two-material Lagrangian state.

    AD and Direct place one interface per direction in the directional
    Lagrangian rectangle; DirectCF places a single interface in the
    rectangle through the Lagrangian face midpoints.
    """
    if lag.materials is None:
        raise ValueError("multimat_partition_fluxes needs a two-material state")
    work = _Work.from_lag(lag)
    g = _geometry_for(lag, fluxes)
    vol_lag = lagrangian_volumes(lag.mesh, fluxes)
    return _partition(work, fluxes, g, kind, vol_lag, diagnostics)


def _geometry_for(lag: LagrangianState, fluxes: FluxSet, *, nodes: bool = False) -> StencilGeometry:
    """Stencil geometry; a pass along one axis sees no transverse displacement."""
    ux, uy = lag.ux_half, lag.uy_half
    if fluxes.fy is None and fluxes.corner is None:
        uy = np.zeros_like(uy)
    elif fluxes.fx is None and fluxes.corner is None:
        ux = np.zeros_like(ux)
    if nodes:
        return StencilGeometry.for_nodes(lag.mesh, ux, uy, lag.dt)
    return StencilGeometry.for_cells(lag.mesh, ux, uy, lag.dt)


# ============================================================================
# Cell remap
# ============================================================================


def _material_values(work: _Work, vol_lag: FloatArray) -> tuple[FloatArray, FloatArray]:
    present = (work.k > 0.0) & (work.mass > 0.0)
    safe_k = np.where(present, work.k, 1.0)
    safe_m = np.where(present, work.mass, 1.0)
    rho = np.where(present, work.mass / (safe_k * vol_lag), 0.0)
    e = np.where(present, work.energy / safe_m, 0.0)
    return rho, e


def _degrade_masks(work: _Work, recon: ReconConfig) -> BoolArray | None:
    if not work.multimat:
        return None
    if recon.interface_degrade:
        usable = work.k > 1.0 - FRACTION_SNAP
    else:
        usable = work.k > 0.0
    return np.asarray(pad_cells(usable.astype(float), work.mesh) > 0.5)


def _snap_and_check(work: _Work, diagnostics: RemapDiagnostics | None) -> None:
    mesh = work.mesh
    if work.multimat:
        for alpha in (0, 1):
            empty = (work.mass[alpha] <= 0.0) & (work.k[alpha] > 0.0)
            if np.any(empty):
                other = 1 - alpha
                logger.warning(
                    f"Material {alpha} mass vanished in {int(np.sum(empty))} cell(s) at step {work.step}"
                )
                work.mass[other][empty] += work.mass[alpha][empty]
                work.energy[other][empty] += work.energy[alpha][empty]
                work.mass[alpha][empty] = 0.0
                work.energy[alpha][empty] = 0.0
                work.k[alpha][empty] = 0.0
                work.k[other][empty] = 1.0
        snapped = snap_pure(work.k, work.mass, work.energy)
        if diagnostics is not None:
            diagnostics.snapped_cells += snapped
    total = work.total_mass()
    bad = total <= 0.0
    if np.any(bad):
        raise NegativeMassError(
            f"Remapped mass {float(np.min(total)):.6g} is not positive",
            cell=first_index(bad),
            step=work.step,
        )
    logger.debug(
        f"step {work.step} remap pass on {mesh.nx}x{mesh.ny}: mass min {float(np.min(total)):.6g}"
    )


def _cell_pass(
    work: _Work,
    fluxes: FluxSet,
    g: StencilGeometry,
    recon: ReconConfig,
    kind: RemapKind,
    diagnostics: RemapDiagnostics | None = None,
) -> FluxSet:
    """
    Remap partial masses and energies through one set of fluxes, in place.

    Returns the total mass fluxes, which drive the dual momentum remap.
    """
    mesh = work.mesh
    n_mat = len(work.eos)
    vol_lag = lagrangian_volumes(mesh, fluxes)
    if np.any(vol_lag <= 0.0):
        raise TangledCellError(
            "Non-positive Lagrangian volume from fluxes", cell=first_index(vol_lag <= 0.0), step=work.step
        )
    if work.multimat:
        fluxes = _partition(work, fluxes, g, kind, vol_lag, diagnostics)
    else:
        fluxes = replace(
            fluxes,
            mat_fx=None if fluxes.fx is None else fluxes.fx[None],
            mat_fy=None if fluxes.fy is None else fluxes.fy[None],
            mat_corner=None if fluxes.corner is None else fluxes.corner[None],
        )

    rho, e = _material_values(work, vol_lag)
    rho_p = pad_cells(rho, mesh)
    e_p = pad_cells(e, mesh)
    usable = _degrade_masks(work, recon)
    multid = (
        kind is RemapKind.DIRECT_CF
        and recon.face_order == 2
        and recon.corner_scheme is CornerScheme.MULTID
    )

    def ok_for(alpha: int, jd: IntArray, id_: IntArray) -> BoolArray | None:
        return None if usable is None else window_all(usable[alpha], jd, id_)

    mass_fx = mass_fy = mass_c = None
    net_mass = np.zeros((n_mat, *mesh.shape))
    net_energy = np.zeros((n_mat, *mesh.shape))
    net_vol = np.zeros((n_mat, *mesh.shape))

    for axis, flux, mat in ((Axis.X, fluxes.fx, fluxes.mat_fx), (Axis.Y, fluxes.fy, fluxes.mat_fy)):
        if flux is None:
            continue
        assert mat is not None
        jd, id_ = _face_donors(flux, axis)
        disp = _face_disp(g, flux, axis)
        sign = np.sign(flux)
        total = np.zeros_like(flux)
        for alpha in range(n_mat):
            ok = ok_for(alpha, jd, id_)
            r_f = face_values(rho_p[alpha], g, jd, id_, sign, disp, axis, recon.face_order, multid=multid, ok=ok)
            e_f = face_values(e_p[alpha], g, jd, id_, sign, disp, axis, recon.face_order, multid=multid, ok=ok)
            gm = r_f * mat[alpha]
            total += gm
            fx_a, fy_a = (gm, None) if axis is Axis.X else (None, gm)
            net_mass[alpha] += _net_faces(fx_a, fy_a, mesh.shape)
            hx_a, hy_a = (gm * e_f, None) if axis is Axis.X else (None, gm * e_f)
            net_energy[alpha] += _net_faces(hx_a, hy_a, mesh.shape)
            vx_a, vy_a = (mat[alpha], None) if axis is Axis.X else (None, mat[alpha])
            net_vol[alpha] += _net_faces(vx_a, vy_a, mesh.shape)
        if axis is Axis.X:
            mass_fx = total
        else:
            mass_fy = total
        logger.debug(
            f"step {work.step} {axis.value}-faces: |dVol| max {float(np.max(np.abs(flux))):.6g}"
        )

    if fluxes.corner is not None:
        assert fluxes.mat_corner is not None and fluxes.sx is not None and fluxes.sy is not None
        assert fluxes.kdx is not None and fluxes.kdy is not None
        sx, sy = fluxes.sx, fluxes.sy
        jd, id_ = _corner_donors(mesh, sx, sy)
        mass_c = np.zeros_like(fluxes.corner)
        for alpha in range(n_mat):
            ok = ok_for(alpha, jd, id_)
            args = (g, jd, id_, sx, sy, fluxes.kdx, fluxes.kdy, recon.corner_scheme)
            r_c = corner_values(rho_p[alpha], *args, ok=ok)
            e_c = corner_values(e_p[alpha], *args, ok=ok)
            cm = r_c * fluxes.mat_corner[alpha]
            mass_c += cm
            net_mass[alpha] += _net_corners(mesh, cm, sx, sy)
            net_energy[alpha] += _net_corners(mesh, cm * e_c, sx, sy)
            net_vol[alpha] += _net_corners(mesh, fluxes.mat_corner[alpha], sx, sy)

    if work.multimat:
        k, violation = remap_volume_fractions(work.k * vol_lag, net_vol, mesh, work.step)
        work.k = k
        if diagnostics is not None:
            diagnostics.max_fraction_violation = max(diagnostics.max_fraction_violation, violation)
    work.mass += net_mass
    work.energy += net_energy
    _snap_and_check(work, diagnostics)
    return FluxSet(fx=mass_fx, fy=mass_fy, corner=mass_c, sx=fluxes.sx, sy=fluxes.sy)


# ============================================================================
# Dual (node) remap
# ============================================================================


def _dual_faces_x(
    mesh: Mesh,
    gflux: FloatArray,
    un_p: FloatArray,
    ut_p: FloatArray,
    g: StencilGeometry,
    order: int,
    multid: bool,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """
    Dual X-face mass and momentum exchange in the local frame.

    Dual face ``k`` joins nodes ``k - 1`` and ``k`` (``k = 0 .. nx + 1``);
    its mass flux is the quarter sum of the four primal X fluxes around it.
    ``un_p``/``ut_p`` are the padded normal/tangential velocity components.
    """
    if mesh.periodic_x:
        gp = np.pad(gflux[:, : mesh.nx], ((0, 0), (1, 2)), mode="wrap")
    else:
        gp = np.pad(gflux, ((0, 0), (1, 1)), mode="reflect")
        gp[:, 0] *= -1.0
        gp[:, -1] *= -1.0
    gp = np.pad(gp, ((1, 1), (0, 0)), mode="wrap" if mesh.periodic_y else "symmetric")
    dual = 0.25 * (gp[:-1, :-1] + gp[:-1, 1:] + gp[1:, :-1] + gp[1:, 1:])

    rows, cols = np.indices(dual.shape)
    jd = rows + GHOST
    id_ = np.where(dual > 0.0, cols - 1, cols) + GHOST
    disp = g.fdisp_x[rows + GHOST, cols + GHOST]
    sign = np.sign(dual)
    vn = face_values(un_p, g, jd, id_, sign, disp, Axis.X, order, multid=multid)
    vt = face_values(ut_p, g, jd, id_, sign, disp, Axis.X, order, multid=multid)
    net_m = dual[:, :-1] - dual[:, 1:]
    flux_n = dual * vn
    flux_t = dual * vt
    return net_m, flux_n[:, :-1] - flux_n[:, 1:], flux_t[:, :-1] - flux_t[:, 1:]


def _pad_corner_pair(mesh: Mesh, d: FloatArray, a: FloatArray) -> tuple[FloatArray, FloatArray]:
    """
    Pad diagonal (``d``) and anti-diagonal (``a``) corner mass fluxes by one node.

    An x-wall mirror exchanges the two families; a y-wall mirror exchanges
    them with a sign change.
    """
    dp = pad_nodes(d, mesh, 1)
    ap = pad_nodes(a, mesh, 1)
    if not mesh.periodic_x:
        for col in (0, -1):
            dp[:, col], ap[:, col] = ap[:, col].copy(), dp[:, col].copy()
    if not mesh.periodic_y:
        for row in (0, -1):
            dp[row, :], ap[row, :] = -ap[row, :].copy(), -dp[row, :].copy()
    return dp, ap


def _dual_corners(
    mesh: Mesh,
    cm: FloatArray,
    sx: FloatArray,
    sy: FloatArray,
    ux_p: FloatArray,
    uy_p: FloatArray,
    g_nodes: StencilGeometry,
    g_cells: StencilGeometry,
    scheme: CornerScheme,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Dual corner exchange: quarter sums of the primal corner fluxes around each cell."""
    d = np.where((sx > 0) & (sy > 0), cm, np.where((sx < 0) & (sy < 0), -cm, 0.0))
    a = np.where((sx < 0) & (sy > 0), cm, np.where((sx > 0) & (sy < 0), -cm, 0.0))
    dp, ap = _pad_corner_pair(mesh, d, a)
    dc = 0.25 * (dp[:-1, :-1] + dp[:-1, 1:] + dp[1:, :-1] + dp[1:, 1:])
    ac = 0.25 * (ap[:-1, :-1] + ap[:-1, 1:] + ap[1:, :-1] + ap[1:, 1:])

    def net(f_d: FloatArray, f_a: FloatArray) -> FloatArray:
        return np.asarray(f_d[:-1, :-1] - f_d[1:, 1:] + f_a[:-1, 1:] - f_a[1:, :-1])

    # Dual corner (r, c) sits at cell (c - 1, r - 1); its cell displacement drives the corner
    rows, cols = np.indices(dc.shape)
    kdx = g_cells.disp_x[rows + GHOST - 1, cols + GHOST - 1]
    kdy = g_cells.disp_y[rows + GHOST - 1, cols + GHOST - 1]
    ones = np.ones(dc.shape, dtype=np.intp)

    pos = dc > 0.0
    jd = np.where(pos, rows + GHOST - 1, rows + GHOST)
    id_ = np.where(pos, cols + GHOST - 1, cols + GHOST)
    s = np.where(pos, ones, -ones)
    dvx = corner_values(ux_p, g_nodes, jd, id_, s, s, kdx, kdy, scheme, face_signs=False)
    dvy = corner_values(uy_p, g_nodes, jd, id_, s, s, kdx, kdy, scheme, face_signs=False)

    pos = ac > 0.0
    jd = np.where(pos, rows + GHOST - 1, rows + GHOST)
    id_ = np.where(pos, cols + GHOST, cols + GHOST - 1)
    s_x = np.where(pos, -ones, ones)
    s_y = -s_x
    avx = corner_values(ux_p, g_nodes, jd, id_, s_x, s_y, kdx, kdy, scheme, face_signs=False)
    avy = corner_values(uy_p, g_nodes, jd, id_, s_x, s_y, kdx, kdy, scheme, face_signs=False)

    return net(dc, ac), net(dc * dvx, ac * avx), net(dc * dvy, ac * avy)


def remap_momentum_dual(
    lag: LagrangianState,
    mass_fluxes: FluxSet,
    mass_after: FloatArray,
    recon: ReconConfig,
    *,
    ux: FloatArray | None = None,
    uy: FloatArray | None = None,
    mass_before: FloatArray | None = None,
    multid: bool = False,
    corner_scheme: CornerScheme | None = None,
) -> tuple[FloatArray, FloatArray]:
    """
    Remap node velocities on the dual grid.

    ``m_p^proj u^proj = m_p^lag u^lag + sum(dm u_f)`` where the nodal masses
    are quarter sums of the cell masses before and after the cell remap and
    the dual fluxes are quarter sums of the primal mass fluxes.

    Raises:
        NegativeMassError: A remapped node mass is not positive
    """
    mesh = lag.mesh
    ux = lag.ux if ux is None else ux
    uy = lag.uy if uy is None else uy
    mass_before = lag.mass if mass_before is None else mass_before
    g = _geometry_for(lag, mass_fluxes, nodes=True)
    ux_p = pad_nodes(ux, mesh, GHOST, negate_x=True)
    uy_p = pad_nodes(uy, mesh, GHOST, negate_y=True)

    mom_x = np.zeros(mesh.node_shape)
    mom_y = np.zeros(mesh.node_shape)
    if mass_fluxes.fx is not None:
        _, nx_, ny_ = _dual_faces_x(mesh, mass_fluxes.fx, ux_p, uy_p, g, recon.face_order, multid)
        mom_x += nx_
        mom_y += ny_
    if mass_fluxes.fy is not None:
        _, n_local, t_local = _dual_faces_x(
            mesh.transposed(), mass_fluxes.fy.T, uy_p.T, ux_p.T, g.transposed(), recon.face_order, multid
        )
        mom_y += n_local.T
        mom_x += t_local.T
    if mass_fluxes.corner is not None:
        assert mass_fluxes.sx is not None and mass_fluxes.sy is not None
        g_cells = _geometry_for(lag, mass_fluxes)
        _, cx, cy = _dual_corners(
            mesh,
            mass_fluxes.corner,
            mass_fluxes.sx,
            mass_fluxes.sy,
            ux_p,
            uy_p,
            g,
            g_cells,
            corner_scheme or recon.corner_scheme,
        )
        mom_x += cx
        mom_y += cy

    mp_before = nodal_masses(mass_before, mesh)
    mp_after = nodal_masses(mass_after, mesh)
    bad = mp_after <= 0.0
    if np.any(bad):
        hit = first_index(bad)
        raise NegativeMassError(
            f"Remapped node mass {float(np.min(mp_after)):.6g} is not positive",
            node=hit,
            step=lag.step,
        )
    ux_new = (mp_before * ux + mom_x) / mp_after
    uy_new = (mp_before * uy + mom_y) / mp_after
    apply_wall_velocity(ux_new, uy_new, mesh)
    sync_periodic_nodes(ux_new, mesh)
    sync_periodic_nodes(uy_new, mesh)
    return ux_new, uy_new


# ============================================================================
# Engines
# ============================================================================


def _finish(work: _Work, lag: LagrangianState, ux: FloatArray, uy: FloatArray, previous_normal: FloatArray | None) -> State:
    """Rebuild Eulerian cell fields from the remapped partial masses and energies."""
    mesh = work.mesh
    area = mesh.cell_area
    mass = work.total_mass()
    rho = mass / area
    e = np.sum(work.energy, axis=0) / mass
    materials: MaterialFields | None = None
    if not work.multimat:
        p = eos_pressure(lag.eos, rho, e)
    else:
        present = work.mass > 0.0
        safe_m = np.where(present, work.mass, 1.0)
        safe_k = np.where(work.k > 0.0, work.k, 1.0)
        mat_e = np.where(present, work.energy / safe_m, 0.0)
        mat_p = np.zeros_like(mat_e)
        for alpha, eos in enumerate(work.eos):
            rho_a = work.mass[alpha] / (safe_k[alpha] * area)
            mat_p[alpha] = np.where(present[alpha], eos_pressure(eos, rho_a, mat_e[alpha]), 0.0)
        p = np.sum(work.k * mat_p, axis=0)
        normal, offset = reconstruct_interfaces(work.k, mesh, previous_normal, step=work.step)
        materials = MaterialFields(
            eos=(work.eos[0], work.eos[1]),
            k=work.k,
            mass=work.mass,
            e=mat_e,
            p=mat_p,
            normal=normal,
            offset=offset,
        )
    return State(
        mesh=mesh,
        eos=lag.eos,
        rho=rho,
        e=e,
        p=np.asarray(p),
        q=lag.q.copy(),
        vol=np.full(mesh.shape, area),
        mass=mass,
        ux=ux,
        uy=uy,
        materials=materials,
        step=lag.step,
    )


def _previous_normal(lag: LagrangianState) -> FloatArray | None:
    return None if lag.materials is None else lag.materials.normal


def remap_cells_1d(
    lag: LagrangianState,
    fluxes: FluxSet,
    recon: ReconConfig,
    axis: Axis,
    diagnostics: RemapDiagnostics | None = None,
) -> State:
    """One directional cell pass from the Lagrangian state; velocities are left untouched."""
    single = replace(fluxes, fy=None, fy_box=None) if axis is Axis.X else replace(fluxes, fx=None, fx_box=None)
    single = replace(single, corner=None)
    work = _Work.from_lag(lag)
    _cell_pass(work, single, _geometry_for(lag, single), recon, RemapKind.AD, diagnostics)
    return _finish(work, lag, lag.ux.copy(), lag.uy.copy(), _previous_normal(lag))


def ad_remap(
    lag: LagrangianState,
    recon: ReconConfig,
    diagnostics: RemapDiagnostics | None = None,
) -> State:
    """
    Alternate-direction remap: X then Y on odd steps, Y then X on even steps.

    Each pass starts from the Eulerian volume; the second pass sees the
    masses, fractions and velocities produced by the first.
    """
    work = _Work.from_lag(lag)
    ux, uy = lag.ux.copy(), lag.uy.copy()
    axes = (Axis.X, Axis.Y) if lag.step % 2 == 1 else (Axis.Y, Axis.X)
    for axis in axes:
        fluxes = ad_flux_set(lag.ux_half, lag.uy_half, lag.dt, lag.mesh, axis, step=lag.step)
        mass_before = work.total_mass()
        mass_fluxes = _cell_pass(work, fluxes, _geometry_for(lag, fluxes), recon, RemapKind.AD, diagnostics)
        ux, uy = remap_momentum_dual(
            lag, mass_fluxes, work.total_mass(), recon, ux=ux, uy=uy, mass_before=mass_before
        )
    return _finish(work, lag, ux, uy, _previous_normal(lag))


def direct_remap(
    lag: LagrangianState,
    recon: ReconConfig,
    diagnostics: RemapDiagnostics | None = None,
) -> State:
    """One-pass remap through the X and Y face fluxes (5-point stencil)."""
    work = _Work.from_lag(lag)
    fluxes = direct_flux_set(lag.ux_half, lag.uy_half, lag.dt, lag.mesh, step=lag.step)
    mass_fluxes = _cell_pass(work, fluxes, _geometry_for(lag, fluxes), recon, RemapKind.DIRECT, diagnostics)
    ux, uy = remap_momentum_dual(lag, mass_fluxes, work.total_mass(), recon)
    return _finish(work, lag, ux, uy, _previous_normal(lag))


def cf_remap(
    lag: LagrangianState,
    recon: ReconConfig,
    diagnostics: RemapDiagnostics | None = None,
) -> State:
    """One-pass remap through face and corner fluxes (9-point stencil)."""
    work = _Work.from_lag(lag)
    fluxes = cf_flux_set(lag.ux_half, lag.uy_half, lag.dt, lag.mesh, step=lag.step)
    mass_fluxes = _cell_pass(work, fluxes, _geometry_for(lag, fluxes), recon, RemapKind.DIRECT_CF, diagnostics)
    multid = recon.face_order == 2 and recon.corner_scheme is CornerScheme.MULTID
    ux, uy = remap_momentum_dual(lag, mass_fluxes, work.total_mass(), recon, multid=multid)
    return _finish(work, lag, ux, uy, _previous_normal(lag))


def remap(
    kind: RemapKind,
    lag: LagrangianState,
    recon: ReconConfig,
    diagnostics: RemapDiagnostics | None = None,
) -> State:
    """Dispatch to the remap engine named by ``kind``."""
    if kind is RemapKind.AD:
        return ad_remap(lag, recon, diagnostics)
    if kind is RemapKind.DIRECT:
        return direct_remap(lag, recon, diagnostics)
    return cf_remap(lag, recon, diagnostics)
