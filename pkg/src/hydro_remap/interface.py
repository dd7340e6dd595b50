"""
Sharp interface reconstruction for two-material cells.

Normals come from the 9-point Youngs gradient of the material-1 volume
fraction; the line offset is the exact inverse of the rectangle/half-plane
area function.
"""

from __future__ import annotations

import math

import numpy as np
from loguru import logger

from .errors import IsolatedMixedCellError
from .geometry import halfplane_fraction
from .models import FloatArray, InterfaceLine, Mesh, Rect
from .mesh_state import pad_cells

# Fractions closer than this to 0 or 1 are snapped to pure.
FRACTION_SNAP = 1e-10
PLACEMENT_TOL = 1e-13


def youngs_gradient(k: FloatArray, dx: float, dy: float) -> tuple[float, float]:
    """Youngs gradient at the centre of a 3x3 stencil indexed ``[j, i]``."""
    gx = ((k[2, 2] + 2.0 * k[1, 2] + k[0, 2]) - (k[2, 0] + 2.0 * k[1, 0] + k[0, 0])) / (8.0 * dx)
    gy = ((k[2, 2] + 2.0 * k[2, 1] + k[2, 0]) - (k[0, 2] + 2.0 * k[0, 1] + k[0, 0])) / (8.0 * dy)
    return float(gx), float(gy)


def youngs_normal(k1: FloatArray, dx: float = 1.0, dy: float = 1.0) -> tuple[float, float]:
    """
    Unit interface normal of the centre cell of a 3x3 material-1 fraction stencil.

    Points from material 0 into material 1.

    Raises:
        IsolatedMixedCellError: The stencil gradient vanishes
    """
    gx, gy = youngs_gradient(np.asarray(k1, dtype=float), dx, dy)
    norm = math.hypot(gx, gy)
    if norm == 0.0:
        raise IsolatedMixedCellError("Volume-fraction gradient vanishes in a mixed cell")
    return gx / norm, gy / norm


def youngs_normals(
    k1: FloatArray, mesh: Mesh, previous: FloatArray | None = None, *, step: int | None = None
) -> FloatArray:
    """
    Normals of every mixed cell, shape ``(2, ny, nx)``; zero in pure cells.

    Mixed cells with a vanishing gradient keep ``previous`` when it holds a
    unit vector, else fall back to (1, 0).
    """
    p = pad_cells(k1, mesh, 1)
    ny, nx = mesh.shape
    east = p[0:ny, 2 : nx + 2] + 2.0 * p[1 : ny + 1, 2 : nx + 2] + p[2 : ny + 2, 2 : nx + 2]
    west = p[0:ny, 0:nx] + 2.0 * p[1 : ny + 1, 0:nx] + p[2 : ny + 2, 0:nx]
    north = p[2 : ny + 2, 0:nx] + 2.0 * p[2 : ny + 2, 1 : nx + 1] + p[2 : ny + 2, 2 : nx + 2]
    south = p[0:ny, 0:nx] + 2.0 * p[0:ny, 1 : nx + 1] + p[0:ny, 2 : nx + 2]
    gx = (east - west) / (8.0 * mesh.dx)
    gy = (north - south) / (8.0 * mesh.dy)
    norm = np.hypot(gx, gy)
    mixed = (k1 > 0.0) & (k1 < 1.0)
    normals = np.zeros((2, ny, nx))
    ok = mixed & (norm > 0.0)
    safe = np.where(ok, norm, 1.0)
    normals[0] = np.where(ok, gx / safe, 0.0)
    normals[1] = np.where(ok, gy / safe, 0.0)
    isolated = mixed & ~ok
    if np.any(isolated):
        fallback = np.zeros((2, ny, nx))
        fallback[0] = 1.0
        if previous is not None:
            has_prev = np.hypot(previous[0], previous[1]) > 0.5
            fallback = np.where(has_prev, previous, fallback)
        normals = np.where(isolated, fallback, normals)
        logger.warning(
            f"{int(np.sum(isolated))} isolated mixed cell(s) kept a fallback normal at step {step}"
        )
    return normals


def _offset_from_fraction(
    k: FloatArray, nx: FloatArray, ny: FloatArray, width: FloatArray, height: FloatArray
) -> FloatArray:
    """Closed-form offset ``s`` (from the rectangle centre) enclosing fraction ``k``."""
    m1 = np.abs(nx) * width
    m2 = np.abs(ny) * height
    a = np.minimum(m1, m2)
    b = np.maximum(m1, m2)
    safe_b = np.where(b > 0.0, b, 1.0)
    v1 = a / (2.0 * safe_b)
    low = np.sqrt(2.0 * a * b * k)
    mid = k * b + 0.5 * a
    high = a + b - np.sqrt(2.0 * a * b * np.clip(1.0 - k, 0.0, None))
    alpha = np.where(k <= v1, low, np.where(k <= 1.0 - v1, mid, high))
    alpha = np.where(a > 0.0, alpha, k * b)
    return np.asarray(alpha - 0.5 * (a + b))


def place_interfaces(
    k0: FloatArray, nx: FloatArray, ny: FloatArray, width: FloatArray, height: FloatArray
) -> FloatArray:
    """
    Vectorised interface offsets, relative to each proxy rectangle centre.

    Material 0 occupies ``n . (x - centre) <= s`` with area ``k0 * width * height``.
    """
    k0, nx, ny, width, height = (
        np.asarray(v, dtype=float) for v in np.broadcast_arrays(k0, nx, ny, width, height)
    )
    s = np.array(_offset_from_fraction(k0, nx, ny, width, height))
    achieved = halfplane_fraction(nx, ny, width, height, s)
    # A vanishing normal has no line to place
    flat = np.abs(nx) * width + np.abs(ny) * height == 0.0
    bad = (np.abs(achieved - k0) > 1e-12) & ~flat
    if np.any(bad):
        s[bad] = _bisect_offset(k0[bad], nx[bad], ny[bad], width[bad], height[bad])
    return s


def _bisect_offset(
    k0: FloatArray, nx: FloatArray, ny: FloatArray, width: FloatArray, height: FloatArray
) -> FloatArray:
    half = 0.5 * (np.abs(nx) * width + np.abs(ny) * height)
    lo, hi = -half, half.copy()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = halfplane_fraction(nx, ny, width, height, mid) < k0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= PLACEMENT_TOL * np.maximum(1.0, 2.0 * half)):
            break
    return np.asarray(0.5 * (lo + hi))


def place_interface(k: float, normal: tuple[float, float], proxy: Rect) -> InterfaceLine:
    """Interface line enclosing fraction ``k`` of ``proxy`` on the material-0 side."""
    width = proxy.x_max - proxy.x_min
    height = proxy.y_max - proxy.y_min
    s = place_interfaces(
        np.asarray(k), np.asarray(normal[0]), np.asarray(normal[1]), np.asarray(width), np.asarray(height)
    )
    return InterfaceLine(normal=normal, offset=float(s), center=proxy.center)


def snap_pure(k: FloatArray, mass: FloatArray, energy: FloatArray) -> int:
    """
    Snap near-pure two-material cells to pure, in place.

    ``k``, ``mass`` and ``energy`` (partial ``m e``) have shape ``(2, ny, nx)``.
    The vanishing material hands its mass and energy to the remaining one.
    Returns the number of snapped cells.
    """
    to_one = (k[0] > 1.0 - FRACTION_SNAP) & ((k[0] != 1.0) | (mass[1] != 0.0))
    to_zero = (k[0] < FRACTION_SNAP) & ((k[0] != 0.0) | (mass[0] != 0.0))
    for keep, drop, mask in ((0, 1, to_one), (1, 0, to_zero)):
        if not np.any(mask):
            continue
        mass[keep][mask] += mass[drop][mask]
        energy[keep][mask] += energy[drop][mask]
        mass[drop][mask] = 0.0
        energy[drop][mask] = 0.0
        k[keep][mask] = 1.0
        k[drop][mask] = 0.0
    return int(np.sum(to_one) + np.sum(to_zero))


def reconstruct_interfaces(
    k: FloatArray, mesh: Mesh, previous: FloatArray | None = None, *, step: int | None = None
) -> tuple[FloatArray, FloatArray]:
    """Normals and Eulerian-cell offsets of every mixed cell; zero in pure cells."""
    normal = youngs_normals(k[1], mesh, previous, step=step)
    offset = place_interfaces(
        k[0], normal[0], normal[1], np.full(mesh.shape, mesh.dx), np.full(mesh.shape, mesh.dy)
    )
    mixed = (k[0] > 0.0) & (k[0] < 1.0)
    return normal, np.asarray(np.where(mixed, offset, 0.0))
