"""
Benchmark cases and the rasterisation of their initial data.

Each builder returns a CaseSpec at full resolution; ``build_case`` applies the
desk divisor. ``initial_case_state`` paints the regions onto the mesh: single
material runs take the region holding each cell centre, two-material runs get
volume fractions from the exact region overlap (sub-sampled for circles).
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import replace

import numpy as np

from .errors import ConfigError
from .interface import reconstruct_interfaces, snap_pure
from .mesh_state import eos_pressure, initial_state
from .models import (
    BoundaryKind,
    CaseSpec,
    EosModel,
    FloatArray,
    MaterialFields,
    Mesh,
    Region,
    RegionShape,
    RemapKind,
    State,
)

CIRCLE_SUBSAMPLES = 16

AIR = EosModel.perfect(1.4)
HELIUM = EosModel.perfect(1.66)
WATER = EosModel.stiffened(7.0, 2.1e9)


# =============================================================================
# Case builders
# =============================================================================


def _advect(multimat: bool) -> CaseSpec:
    """Square advected along x = y for T/2, then sent back."""
    square = (0.1, 0.1, 0.3, 0.3)
    if multimat:
        eos: tuple[EosModel, ...] = (AIR, AIR)
        regions = (
            Region(RegionShape.ALL, rho=1.29, p=1.0, ux=5.0, uy=5.0),
            Region(RegionShape.RECT, square, rho=1.29, p=1.0, ux=5.0, uy=5.0, material=1),
        )
    else:
        eos = (AIR,)
        regions = (
            Region(RegionShape.ALL, rho=0.1, p=1.0, ux=5.0, uy=5.0),
            Region(RegionShape.RECT, square, rho=10.0, p=1.0, ux=5.0, uy=5.0),
        )
    return CaseSpec(
        name="multi_advect" if multimat else "mono_advect",
        mesh=Mesh.uniform(100, 100, 1.0, 1.0),
        eos=eos,
        regions=regions,
        end_time=0.16,
        reverse_time=0.08,
        scheme=RemapKind.DIRECT_CF,
        description=(
            "Square of air advected into air and back" if multimat else "Dense square advected and back"
        ),
    )


def _rotation(multimat: bool) -> CaseSpec:
    """Square turned once around the domain centre by an imposed solid rotation."""
    square = (0.4, 0.65, 0.6, 0.85)
    if multimat:
        eos: tuple[EosModel, ...] = (AIR, AIR)
        regions = (
            Region(RegionShape.ALL, rho=1.29, p=1.0),
            Region(RegionShape.RECT, square, rho=1.29, p=1.0, material=1),
        )
    else:
        eos = (AIR,)
        regions = (
            Region(RegionShape.ALL, rho=0.1, p=1.0),
            Region(RegionShape.RECT, square, rho=10.0, p=1.0),
        )
    return CaseSpec(
        name="multi_rotation" if multimat else "mono_rotation",
        mesh=Mesh.uniform(100, 100, 1.0, 1.0, boundary=BoundaryKind.WALL),
        eos=eos,
        regions=regions,
        end_time=1.0,
        rotation_omega=2.0 * math.pi,
        rotation_center=(0.5, 0.5),
        description="Solid rotation (2 pi) of a square",
    )


def _water_air_rotation() -> CaseSpec:
    return CaseSpec(
        name="water_air_rotation",
        mesh=Mesh.uniform(400, 400, 0.04, 0.04, boundary=BoundaryKind.WALL),
        eos=(AIR, WATER),
        regions=(
            Region(RegionShape.ALL, rho=1.29, p=1e5),
            Region(RegionShape.RECT, (0.015, 0.025, 0.025, 0.035), rho=1000.0, p=1e5, material=1),
        ),
        end_time=1e-3,
        rotation_omega=2.0 * math.pi * 1e3,
        rotation_center=(0.02, 0.02),
        description="Solid rotation of a square of water into air",
    )


def _haas() -> CaseSpec:
    return CaseSpec(
        name="haas",
        mesh=Mesh.uniform(1000, 90, 10.0, 0.09, boundary=BoundaryKind.WALL),
        eos=(AIR, HELIUM),
        regions=(
            Region(RegionShape.ALL, rho=1.0, p=1e5),
            Region(RegionShape.HALF_PLANE, (0.6,), rho=1.376363, p=1.5698e5, ux=124.824),
            Region(RegionShape.CIRCLE, (0.75, 0.045, 0.025), rho=0.18187, p=1e5, material=1),
        ),
        end_time=1e-3,
        description="Shock in air hitting a helium bubble",
    )


def _impact() -> CaseSpec:
    return CaseSpec(
        name="impact",
        mesh=Mesh.uniform(320, 160, 0.1, 0.05, boundary=BoundaryKind.WALL),
        eos=(AIR, WATER),
        regions=(
            Region(RegionShape.ALL, rho=1.29, p=1e5, ux=-1000.0),
            Region(RegionShape.HALF_PLANE, (0.01,), rho=1000.0, p=1e5, material=1),
            Region(RegionShape.CIRCLE, (0.03, 0.025, 0.01), rho=1000.0, p=1e5, ux=-1000.0, material=1),
        ),
        end_time=6e-3,
        snapshot_times=(3.5e-3, 4.5e-3, 6e-3),
        description="Water drop carried by air onto a water wall",
    )


_BUILDERS: dict[str, Callable[[], CaseSpec]] = {
    "mono_advect": lambda: _advect(False),
    "multi_advect": lambda: _advect(True),
    "mono_rotation": lambda: _rotation(False),
    "multi_rotation": lambda: _rotation(True),
    "water_air_rotation": _water_air_rotation,
    "haas": _haas,
    "impact": _impact,
}


def case_names() -> list[str]:
    """Names accepted by ``build_case``."""
    return list(_BUILDERS)


def build_case(name: str, divisor: int = 1, resolution: tuple[int, int] | None = None) -> CaseSpec:
    """
    Build a benchmark case.

    Args:
        name: Case name (see ``case_names``)
        divisor: Integer applied to both cell counts for desk runs
        resolution: Explicit (nx, ny), overriding the divisor

    Raises:
        ConfigError: Unknown case name
    """
    builder = _BUILDERS.get(name)
    if builder is None:
        raise ConfigError(f"Unknown case '{name}', expected one of: {', '.join(_BUILDERS)}")
    case = builder()
    mesh = case.mesh.resized(*resolution) if resolution else case.mesh.coarsened(divisor)
    return replace(case, mesh=mesh)


# =============================================================================
# Rasterisation
# =============================================================================


def region_coverage(region: Region, mesh: Mesh) -> FloatArray:
    """Fraction of every cell covered by ``region``."""
    xn, yn = mesh.node_coords()
    x_lo, x_hi = xn[:-1, :-1], xn[:-1, 1:]
    y_lo, y_hi = yn[:-1, :-1], yn[1:, :-1]
    if region.shape is RegionShape.ALL:
        return np.ones(mesh.shape)
    if region.shape is RegionShape.RECT:
        x_min, y_min, x_max, y_max = region.params
        wx = np.clip(np.minimum(x_hi, x_max) - np.maximum(x_lo, x_min), 0.0, None)
        wy = np.clip(np.minimum(y_hi, y_max) - np.maximum(y_lo, y_min), 0.0, None)
        return np.asarray(wx * wy / mesh.cell_area)
    if region.shape is RegionShape.HALF_PLANE:
        return np.asarray(np.clip((region.params[0] - x_lo) / mesh.dx, 0.0, 1.0))
    inside = np.zeros(mesh.shape)
    offsets = (np.arange(CIRCLE_SUBSAMPLES) + 0.5) / CIRCLE_SUBSAMPLES
    for oy in offsets:
        for ox in offsets:
            inside += region.contains(x_lo + ox * mesh.dx, y_lo + oy * mesh.dy)
    return inside / CIRCLE_SUBSAMPLES**2


def region_shares(case: CaseSpec, mesh: Mesh) -> FloatArray:
    """
    Share of every cell owned by each region, shape ``(n_regions, ny, nx)``.

    Later regions are painted over earlier ones; shares sum to 1.
    """
    shares = np.zeros((len(case.regions), *mesh.shape))
    for r, region in enumerate(case.regions):
        cover = region_coverage(region, mesh)
        shares[:r] *= 1.0 - cover
        shares[r] = cover
    return shares


def _painted(values: list[float], x: FloatArray, y: FloatArray, regions: tuple[Region, ...]) -> FloatArray:
    out = np.full(np.shape(x), values[0])
    for region, value in zip(regions[1:], values[1:], strict=True):
        out = np.where(region.contains(x, y), value, out)
    return out


def rotation_velocity(case: CaseSpec, mesh: Mesh) -> tuple[FloatArray, FloatArray]:
    """Node velocity of the imposed solid rotation."""
    assert case.rotation_omega is not None
    xn, yn = mesh.node_coords()
    xc, yc = case.rotation_center
    return -case.rotation_omega * (yn - yc), case.rotation_omega * (xn - xc)


def _node_velocity(case: CaseSpec) -> tuple[FloatArray, FloatArray]:
    mesh = case.mesh
    if case.prescribed_velocity:
        return rotation_velocity(case, mesh)
    xn, yn = mesh.node_coords()
    ux = _painted([r.ux for r in case.regions], xn, yn, case.regions)
    uy = _painted([r.uy for r in case.regions], xn, yn, case.regions)
    return ux, uy


def initial_case_state(case: CaseSpec) -> State:
    """Paint the regions of ``case`` onto its mesh."""
    mesh = case.mesh
    ux, uy = _node_velocity(case)
    if not case.multimat:
        xc, yc = mesh.cell_centers()
        rho = _painted([r.rho for r in case.regions], xc, yc, case.regions)
        p = _painted([r.p for r in case.regions], xc, yc, case.regions)
        return initial_state(mesh, case.eos[0], rho, p, ux, uy)

    shares = region_shares(case, mesh)
    k = np.zeros((2, *mesh.shape))
    mass = np.zeros((2, *mesh.shape))
    energy = np.zeros((2, *mesh.shape))
    for share, region in zip(shares, case.regions, strict=True):
        eos = case.eos[region.material]
        k[region.material] += share
        mass[region.material] += share * region.rho * mesh.cell_area
        energy[region.material] += share * region.rho * mesh.cell_area * float(
            eos.internal_energy(region.rho, region.p)
        )
    k[1] = np.clip(k[1], 0.0, 1.0)
    k[0] = 1.0 - k[1]
    snap_pure(k, mass, energy)
    present = mass > 0.0
    safe_m = np.where(present, mass, 1.0)
    safe_k = np.where(k > 0.0, k, 1.0)
    mat_e = np.where(present, energy / safe_m, 0.0)
    mat_p = np.zeros_like(mat_e)
    for alpha, eos in enumerate(case.eos):
        rho_a = mass[alpha] / (safe_k[alpha] * mesh.cell_area)
        mat_p[alpha] = np.where(present[alpha], eos_pressure(eos, rho_a, mat_e[alpha]), 0.0)
    normal, offset = reconstruct_interfaces(k, mesh, step=0)
    materials = MaterialFields(
        eos=(case.eos[0], case.eos[1]),
        k=k,
        mass=mass,
        e=mat_e,
        p=mat_p,
        normal=normal,
        offset=offset,
    )
    rho = np.sum(mass, axis=0) / mesh.cell_area
    p = np.sum(k * mat_p, axis=0)
    return initial_state(mesh, case.eos[0], rho, p, ux, uy, materials)
