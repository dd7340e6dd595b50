"""
Grid geometry, equations of state and nodal quantities.

Every phase of the scheme goes through the helpers in this module: the
two-triangle cell volume, the perfect and stiffened gas laws, the quarter-sum
nodal masses and the ghost padding that implements periodic and wall
boundaries.
"""

from __future__ import annotations

import numpy as np

from .errors import TangledCellError, UnphysicalStateError, first_index
from .models import (
    EosKind,
    EosModel,
    FloatArray,
    MaterialFields,
    Mesh,
    State,
    StepTotals,
)

# Width of the ghost layer around padded cell and node fields.
GHOST = 2


def _cross(ax: FloatArray, ay: FloatArray, bx: FloatArray, by: FloatArray) -> FloatArray:
    return np.asarray(ax * by - ay * bx)


def cell_volume(
    p00: tuple[float, float],
    p10: tuple[float, float],
    p11: tuple[float, float],
    p01: tuple[float, float],
    *,
    cell: tuple[int, int] | None = None,
    step: int | None = None,
) -> float:
    """
    Area of a quadrilateral cell from its four nodes in counter-clockwise order.

    The area is the sum of the triangles (p00, p10, p01) and (p11, p01, p10).
    Either triangle turning non-positive means the cell is tangled.
    """
    lower = 0.5 * ((p10[0] - p00[0]) * (p01[1] - p00[1]) - (p10[1] - p00[1]) * (p01[0] - p00[0]))
    upper = 0.5 * ((p01[0] - p11[0]) * (p10[1] - p11[1]) - (p01[1] - p11[1]) * (p10[0] - p11[0]))
    if lower <= 0.0 or upper <= 0.0:
        raise TangledCellError(
            f"Tangled cell: triangle areas {lower:.6g} and {upper:.6g}", cell=cell, step=step
        )
    return float(lower + upper)


def cell_volumes(
    xn: FloatArray, yn: FloatArray, *, step: int | None = None, check: bool = True
) -> FloatArray:
    """Vectorised ``cell_volume`` over node arrays of shape ``(ny + 1, nx + 1)``."""
    x00, y00 = xn[:-1, :-1], yn[:-1, :-1]
    x10, y10 = xn[:-1, 1:], yn[:-1, 1:]
    x11, y11 = xn[1:, 1:], yn[1:, 1:]
    x01, y01 = xn[1:, :-1], yn[1:, :-1]
    lower = 0.5 * _cross(x10 - x00, y10 - y00, x01 - x00, y01 - y00)
    upper = 0.5 * _cross(x01 - x11, y01 - y11, x10 - x11, y10 - y11)
    if check:
        bad = (lower <= 0.0) | (upper <= 0.0)
        if np.any(bad):
            raise TangledCellError(
                "Tangled cell: non-positive triangle area", cell=first_index(bad), step=step
            )
    return np.asarray(lower + upper)


def eos_pressure(eos: EosModel, rho: FloatArray | float, e: FloatArray | float) -> FloatArray:
    """Pressure ``(gamma - 1) rho e - pi``; negative values are returned unchanged."""
    p = (eos.gamma - 1.0) * np.asarray(rho) * np.asarray(e)
    if eos.kind is EosKind.STIFFENED:
        p = p - eos.pi_const
    return np.asarray(p)


def sound_speed(
    eos: EosModel,
    rho: FloatArray | float,
    p: FloatArray | float,
    *,
    step: int | None = None,
) -> FloatArray:
    """Sound speed ``sqrt(gamma (P + pi) / rho)``."""
    radicand = eos.gamma * (np.asarray(p) + eos.pi_const) / np.asarray(rho)
    bad = ~(radicand >= 0.0)
    if np.any(bad):
        cell = first_index(np.atleast_2d(bad)) if np.ndim(bad) else None
        raise UnphysicalStateError(
            f"Negative sound-speed radicand {float(np.min(radicand)):.6g}", cell=cell, step=step
        )
    return np.sqrt(radicand)


def mixture_sound_speed(state: State) -> FloatArray:
    """Cell sound speed; in mixed cells the largest speed of the present materials."""
    if state.materials is None:
        return sound_speed(state.eos, state.rho, state.p, step=state.step)
    mat = state.materials
    speed = np.zeros(state.mesh.shape)
    for alpha, eos in enumerate(mat.eos):
        present = mat.k[alpha] > 0.0
        if not np.any(present):
            continue
        rho_a = mat.mass[alpha][present] / (mat.k[alpha][present] * state.vol[present])
        c = sound_speed(eos, rho_a, mat.p[alpha][present], step=state.step)
        speed[present] = np.maximum(speed[present], c)
    return speed


def pad_cells(
    a: FloatArray,
    mesh: Mesh,
    width: int = GHOST,
    *,
    negate_x: bool = False,
    negate_y: bool = False,
) -> FloatArray:
    """
    Surround a cell field (last two axes ``(ny, nx)``) with ghost cells.

    Periodic sides wrap, wall sides mirror. With ``negate_x`` (``negate_y``)
    the ghost cells across x-walls (y-walls) change sign.
    """
    lead = [(0, 0)] * (a.ndim - 2)
    mode_x = "wrap" if mesh.periodic_x else "symmetric"
    mode_y = "wrap" if mesh.periodic_y else "symmetric"
    out = np.pad(a, [*lead, (0, 0), (width, width)], mode=mode_x)
    if negate_x and not mesh.periodic_x:
        out[..., :width] *= -1.0
        out[..., -width:] *= -1.0
    out = np.pad(out, [*lead, (width, width), (0, 0)], mode=mode_y)
    if negate_y and not mesh.periodic_y:
        out[..., :width, :] *= -1.0
        out[..., -width:, :] *= -1.0
    return out


def pad_nodes(
    a: FloatArray,
    mesh: Mesh,
    width: int = GHOST,
    *,
    negate_x: bool = False,
    negate_y: bool = False,
) -> FloatArray:
    """
    Surround a node field (last two axes ``(ny + 1, nx + 1)``) with ghost nodes.

    Periodic sides wrap the unique nodes, wall sides mirror about the wall
    node. Padded index ``I + width`` holds node ``I``.
    """
    lead = [(0, 0)] * (a.ndim - 2)
    if mesh.periodic_x:
        out = np.pad(a[..., : mesh.nx], [*lead, (0, 0), (width, width + 1)], mode="wrap")
    else:
        out = np.pad(a, [*lead, (0, 0), (width, width)], mode="reflect")
        if negate_x:
            out[..., :width] *= -1.0
            out[..., -width:] *= -1.0
    if mesh.periodic_y:
        out = np.pad(out[..., : mesh.ny, :], [*lead, (width, width + 1), (0, 0)], mode="wrap")
    else:
        out = np.pad(out, [*lead, (width, width), (0, 0)], mode="reflect")
        if negate_y:
            out[..., :width, :] *= -1.0
            out[..., -width:, :] *= -1.0
    return out


def padded_node_coords(mesh: Mesh, width: int = GHOST) -> tuple[FloatArray, FloatArray]:
    """Eulerian coordinates of padded nodes, continued linearly past the domain."""
    xs = mesh.x0 + np.arange(-width, mesh.nx + 1 + width) * mesh.dx
    ys = mesh.y0 + np.arange(-width, mesh.ny + 1 + width) * mesh.dy
    xx, yy = np.meshgrid(xs, ys)
    return xx, yy


def padded_cell_centers(mesh: Mesh, width: int = GHOST) -> tuple[FloatArray, FloatArray]:
    """Eulerian centres of padded cells, continued linearly past the domain."""
    xs = mesh.x0 + (np.arange(-width, mesh.nx + width) + 0.5) * mesh.dx
    ys = mesh.y0 + (np.arange(-width, mesh.ny + width) + 0.5) * mesh.dy
    xx, yy = np.meshgrid(xs, ys)
    return xx, yy


def sync_periodic_nodes(a: FloatArray, mesh: Mesh) -> FloatArray:
    """Copy the first node row/column onto its periodic duplicate, in place."""
    if mesh.periodic_x:
        a[..., :, mesh.nx] = a[..., :, 0]
    if mesh.periodic_y:
        a[..., mesh.ny, :] = a[..., 0, :]
    return a


def apply_wall_velocity(ux: FloatArray, uy: FloatArray, mesh: Mesh) -> None:
    """Zero the wall-normal velocity component on wall nodes, in place."""
    if not mesh.periodic_x:
        ux[:, 0] = 0.0
        ux[:, -1] = 0.0
    if not mesh.periodic_y:
        uy[0, :] = 0.0
        uy[-1, :] = 0.0


def nodal_masses(mass: FloatArray, mesh: Mesh) -> FloatArray:
    """Node masses ``m_p``: a quarter of the four surrounding cell masses."""
    p = pad_cells(mass, mesh, 1)
    ny, nx = mesh.ny, mesh.nx
    return np.asarray(
        0.25
        * (
            p[..., 0 : ny + 1, 0 : nx + 1]
            + p[..., 0 : ny + 1, 1 : nx + 2]
            + p[..., 1 : ny + 2, 0 : nx + 1]
            + p[..., 1 : ny + 2, 1 : nx + 2]
        )
    )


def unique_node_view(a: FloatArray, mesh: Mesh) -> FloatArray:
    """Node field without the periodic duplicate row and column."""
    rows, cols = mesh.unique_nodes()
    return a[..., rows, cols]


def initial_state(
    mesh: Mesh,
    eos: EosModel,
    rho: FloatArray,
    p: FloatArray,
    ux: FloatArray,
    uy: FloatArray,
    materials: MaterialFields | None = None,
) -> State:
    """Build an Eulerian state from primitive cell and node fields."""
    vol = np.full(mesh.shape, mesh.cell_area)
    mass = rho * vol
    if materials is None:
        e = eos.internal_energy(rho, p)
    else:
        e = np.sum(materials.mass * materials.e, axis=0) / mass
    ux = ux.copy()
    uy = uy.copy()
    apply_wall_velocity(ux, uy, mesh)
    sync_periodic_nodes(ux, mesh)
    sync_periodic_nodes(uy, mesh)
    return State(
        mesh=mesh,
        eos=eos,
        rho=np.asarray(rho, dtype=float),
        e=np.asarray(e, dtype=float),
        p=np.asarray(p, dtype=float),
        q=np.zeros(mesh.shape),
        vol=vol,
        mass=mass,
        ux=ux,
        uy=uy,
        materials=materials,
    )


def conserved_totals(state: State, dt: float = 0.0) -> StepTotals:
    """Mass, momentum and energy totals of a state."""
    mesh = state.mesh
    m_p = unique_node_view(nodal_masses(state.mass, mesh), mesh)
    ux = unique_node_view(state.ux, mesh)
    uy = unique_node_view(state.uy, mesh)
    material_mass: tuple[float, ...] = ()
    if state.materials is not None:
        material_mass = tuple(float(np.sum(m)) for m in state.materials.mass)
    return StepTotals(
        step=state.step,
        time=state.time,
        dt=dt,
        mass=float(np.sum(state.mass)),
        momentum_x=float(np.sum(m_p * ux)),
        momentum_y=float(np.sum(m_p * uy)),
        internal_energy=float(np.sum(state.mass * state.e)),
        kinetic_energy=float(0.5 * np.sum(m_p * (ux**2 + uy**2))),
        material_mass=material_mass,
        rho_min=float(np.min(state.rho)),
        rho_max=float(np.max(state.rho)),
        p_min=float(np.min(state.p)),
        p_max=float(np.max(state.p)),
    )
