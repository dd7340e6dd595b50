"""
Face and corner value reconstruction for the remap.

Every kernel works on a padded field ``a`` of "sites" (cells for the primal
remap, nodes for the dual momentum remap) together with a
``StencilGeometry`` holding the Lagrangian centroids, widths and
displacements of the same sites. Donor sites are given as integer index
arrays into the padded field, so one gather evaluates a whole flux field.

Slopes use the Van Leer limiter in its harmonic-mean form
``2 d- d+ / (d- + d+)``; the scalar functions at the bottom of the module
evaluate single stencils.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import TangledCellError
from .models import Axis, CornerScheme, FloatArray, Mesh, PlaneRecon
from .mesh_state import GHOST, pad_nodes, padded_cell_centers, padded_node_coords

IntArray = NDArray[np.intp]

# Gradients below this norm are treated as a flat plane.
FLAT_GRADIENT = 1e-300

_NEIGHBOURS = [(dj, di) for dj in (-1, 0, 1) for di in (-1, 0, 1) if (dj, di) != (0, 0)]


def van_leer(r: FloatArray | float) -> FloatArray | float:
    """Van Leer limiter ``(r + |r|) / (1 + r)``; zero for ``r <= 0``, 2 as ``r -> inf``."""
    ratio = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = (ratio + np.abs(ratio)) / (1.0 + ratio)
    phi = np.where(ratio > 0.0, phi, 0.0)
    phi = np.where(np.isposinf(ratio), 2.0, phi)
    return float(phi) if phi.ndim == 0 else np.asarray(phi)


def limited_slope(d_minus: FloatArray, d_plus: FloatArray) -> FloatArray:
    """
    ``1/2 (phi(r) d+ + phi(1/r) d-)`` with ``r = d- / d+``.

    Closed form: the harmonic mean of the one-sided slopes when they share a
    sign, zero otherwise.
    """
    d_minus = np.asarray(d_minus, dtype=float)
    d_plus = np.asarray(d_plus, dtype=float)
    same = d_minus * d_plus > 0.0
    denom = np.where(same, d_minus + d_plus, 1.0)
    return np.asarray(np.where(same, 2.0 * d_minus * d_plus / denom, 0.0))


def limited_gradient_1d(
    a_minus: float,
    a_center: float,
    a_plus: float,
    xlag_minus: float,
    xlag_center: float,
    xlag_plus: float,
) -> float:
    """
    Limited slope of a 3-point stencil over Lagrangian centroid spacing.

    Raises:
        TangledCellError: Centroids are not strictly increasing
    """
    h_minus = xlag_center - xlag_minus
    h_plus = xlag_plus - xlag_center
    if h_minus <= 0.0 or h_plus <= 0.0:
        raise TangledCellError(
            f"Lagrangian centroids not increasing: spacings {h_minus:.6g}, {h_plus:.6g}"
        )
    d_minus = (a_center - a_minus) / h_minus
    d_plus = (a_plus - a_center) / h_plus
    phi_plus = van_leer(d_minus / d_plus) if d_plus != 0.0 else 0.0
    phi_minus = van_leer(d_plus / d_minus) if d_minus != 0.0 else 0.0
    return float(0.5 * (phi_plus * d_plus + phi_minus * d_minus))


@dataclass
class StencilGeometry:
    """
    Lagrangian geometry of padded sites.

    Attributes:
        x, y: Lagrangian centroids, shape (rows, cols)
        wx, wy: Lagrangian widths of each site
        disp_x, disp_y: Displacement of each site over the step
        fdisp_x: x displacement of the X face on the left of each site,
            shape (rows, cols + 1)
        fdisp_y: y displacement of the Y face below each site, shape (rows + 1, cols)
        hx, hy: Eulerian spacing
    """

    x: FloatArray
    y: FloatArray
    wx: FloatArray
    wy: FloatArray
    disp_x: FloatArray
    disp_y: FloatArray
    fdisp_x: FloatArray
    fdisp_y: FloatArray
    hx: float
    hy: float

    @classmethod
    def _from_faces(
        cls,
        xc: FloatArray,
        yc: FloatArray,
        disp_x: FloatArray,
        disp_y: FloatArray,
        fdisp_x: FloatArray,
        fdisp_y: FloatArray,
        hx: float,
        hy: float,
    ) -> StencilGeometry:
        return cls(
            x=xc + disp_x,
            y=yc + disp_y,
            wx=hx + fdisp_x[:, 1:] - fdisp_x[:, :-1],
            wy=hy + fdisp_y[1:, :] - fdisp_y[:-1, :],
            disp_x=disp_x,
            disp_y=disp_y,
            fdisp_x=fdisp_x,
            fdisp_y=fdisp_y,
            hx=hx,
            hy=hy,
        )

    @classmethod
    def for_cells(
        cls, mesh: Mesh, ux_half: FloatArray, uy_half: FloatArray, dt: float
    ) -> StencilGeometry:
        """Cells padded by ``GHOST``; padded cell ``[r, c]`` is cell ``(c - GHOST, r - GHOST)``."""
        ux = pad_nodes(ux_half, mesh, GHOST, negate_x=True)
        uy = pad_nodes(uy_half, mesh, GHOST, negate_y=True)
        disp_x = 0.25 * dt * (ux[:-1, :-1] + ux[:-1, 1:] + ux[1:, :-1] + ux[1:, 1:])
        disp_y = 0.25 * dt * (uy[:-1, :-1] + uy[:-1, 1:] + uy[1:, :-1] + uy[1:, 1:])
        fdisp_x = 0.5 * dt * (ux[:-1, :] + ux[1:, :])
        fdisp_y = 0.5 * dt * (uy[:, :-1] + uy[:, 1:])
        xc, yc = padded_cell_centers(mesh, GHOST)
        return cls._from_faces(xc, yc, disp_x, disp_y, fdisp_x, fdisp_y, mesh.dx, mesh.dy)

    @classmethod
    def for_nodes(
        cls, mesh: Mesh, ux_half: FloatArray, uy_half: FloatArray, dt: float
    ) -> StencilGeometry:
        """Nodes padded by ``GHOST``; the dual cell of a node spans the four quarter cells around it."""
        ux = pad_nodes(ux_half, mesh, GHOST + 1, negate_x=True)
        uy = pad_nodes(uy_half, mesh, GHOST + 1, negate_y=True)
        disp_x = dt * ux[1:-1, 1:-1]
        disp_y = dt * uy[1:-1, 1:-1]
        fdisp_x = 0.5 * dt * (ux[1:-1, :-1] + ux[1:-1, 1:])
        fdisp_y = 0.5 * dt * (uy[:-1, 1:-1] + uy[1:, 1:-1])
        xn, yn = padded_node_coords(mesh, GHOST)
        return cls._from_faces(xn, yn, disp_x, disp_y, fdisp_x, fdisp_y, mesh.dx, mesh.dy)

    def transposed(self) -> StencilGeometry:
        """Geometry seen in a frame where x and y are exchanged."""
        return StencilGeometry(
            x=self.y.T,
            y=self.x.T,
            wx=self.wy.T,
            wy=self.wx.T,
            disp_x=self.disp_y.T,
            disp_y=self.disp_x.T,
            fdisp_x=self.fdisp_y.T,
            fdisp_y=self.fdisp_x.T,
            hx=self.hy,
            hy=self.hx,
        )


def window_all(mask: NDArray[np.bool_], jd: IntArray, id_: IntArray) -> NDArray[np.bool_]:
    """True where the 3x3 window around each donor is entirely True in ``mask``."""
    ok = np.ones(np.shape(jd), dtype=bool)
    for dj in (-1, 0, 1):
        for di in (-1, 0, 1):
            ok &= mask[jd + dj, id_ + di]
    return ok


def directional_slope(
    a: FloatArray,
    g: StencilGeometry,
    jd: IntArray,
    id_: IntArray,
    step_j: int,
    step_i: int,
    direction: tuple[float, float],
) -> FloatArray:
    """
    Limited slope along ``direction`` through the neighbours ``(jd -+ step_j, id -+ step_i)``.

    Raises:
        TangledCellError: Centroid spacing along the direction is not positive
    """
    ex, ey = direction
    jm, im = jd - step_j, id_ - step_i
    jp, ip = jd + step_j, id_ + step_i
    h_minus = ex * (g.x[jd, id_] - g.x[jm, im]) + ey * (g.y[jd, id_] - g.y[jm, im])
    h_plus = ex * (g.x[jp, ip] - g.x[jd, id_]) + ey * (g.y[jp, ip] - g.y[jd, id_])
    if np.any(h_minus <= 0.0) or np.any(h_plus <= 0.0):
        raise TangledCellError("Lagrangian centroids not increasing in a reconstruction stencil")
    centre = a[jd, id_]
    return limited_slope((centre - a[jm, im]) / h_minus, (a[jp, ip] - centre) / h_plus)


def slope_x(a: FloatArray, g: StencilGeometry, jd: IntArray, id_: IntArray) -> FloatArray:
    return directional_slope(a, g, jd, id_, 0, 1, (1.0, 0.0))


def slope_y(a: FloatArray, g: StencilGeometry, jd: IntArray, id_: IntArray) -> FloatArray:
    return directional_slope(a, g, jd, id_, 1, 0, (0.0, 1.0))


def _diagonals(g: StencilGeometry) -> tuple[tuple[float, float], tuple[float, float]]:
    norm = math.hypot(g.hx, g.hy)
    return (g.hx / norm, g.hy / norm), (g.hx / norm, -g.hy / norm)


def slope_diag(a: FloatArray, g: StencilGeometry, jd: IntArray, id_: IntArray) -> FloatArray:
    """Slope along ``v = (hx, hy) / |h|`` through ``(j-1, i-1)`` and ``(j+1, i+1)``."""
    return directional_slope(a, g, jd, id_, 1, 1, _diagonals(g)[0])


def slope_antidiag(a: FloatArray, g: StencilGeometry, jd: IntArray, id_: IntArray) -> FloatArray:
    """Slope along ``v_perp = (hx, -hy) / |h|`` through ``(j+1, i-1)`` and ``(j-1, i+1)``."""
    return directional_slope(a, g, jd, id_, -1, 1, _diagonals(g)[1])


def _solve_2x2_qr(m: FloatArray, rhs: FloatArray) -> tuple[FloatArray, FloatArray]:
    """Solve stacked 2x2 systems through a batched QR factorisation."""
    q, r = np.linalg.qr(m)
    b = np.einsum("...ji,...j->...i", q, rhs)
    r11 = r[..., 1, 1]
    r00 = r[..., 0, 0]
    gy = np.where(r11 != 0.0, b[..., 1] / np.where(r11 != 0.0, r11, 1.0), 0.0)
    gx = (b[..., 0] - r[..., 0, 1] * gy) / np.where(r00 != 0.0, r00, 1.0)
    return np.asarray(gx), np.asarray(gy)


def multid_gradients(
    a: FloatArray,
    g: StencilGeometry,
    jd: IntArray,
    id_: IntArray,
    *,
    limit: bool = True,
) -> tuple[FloatArray, FloatArray]:
    """
    Least-squares plane gradient over the 3x3 stencil of each donor.

    With ``limit`` the gradient is scaled by
    ``min(|d_x|, |d_y|, |d_v|, |d_vperp|) / |G|`` so its norm equals the
    smallest limited 1D slope and its direction is kept.
    """
    shape = np.shape(jd)
    if np.size(jd) == 0:
        return np.zeros(shape), np.zeros(shape)
    dxs = np.stack([g.x[jd + dj, id_ + di] - g.x[jd, id_] for dj, di in _NEIGHBOURS], axis=-1)
    dys = np.stack([g.y[jd + dj, id_ + di] - g.y[jd, id_] for dj, di in _NEIGHBOURS], axis=-1)
    das = np.stack([a[jd + dj, id_ + di] - a[jd, id_] for dj, di in _NEIGHBOURS], axis=-1)
    m = np.empty((*shape, 2, 2))
    m[..., 0, 0] = np.sum(dxs * dxs, axis=-1)
    m[..., 0, 1] = m[..., 1, 0] = np.sum(dxs * dys, axis=-1)
    m[..., 1, 1] = np.sum(dys * dys, axis=-1)
    rhs = np.stack([np.sum(dxs * das, axis=-1), np.sum(dys * das, axis=-1)], axis=-1)
    gx, gy = _solve_2x2_qr(m, rhs)
    if not limit:
        return gx, gy
    bound = np.minimum.reduce(
        [
            np.abs(slope_x(a, g, jd, id_)),
            np.abs(slope_y(a, g, jd, id_)),
            np.abs(slope_diag(a, g, jd, id_)),
            np.abs(slope_antidiag(a, g, jd, id_)),
        ]
    )
    norm = np.hypot(gx, gy)
    phi = np.where(norm < FLAT_GRADIENT, 0.0, bound / np.where(norm < FLAT_GRADIENT, 1.0, norm))
    return phi * gx, phi * gy


def face_values(
    a: FloatArray,
    g: StencilGeometry,
    jd: IntArray,
    id_: IntArray,
    sign: FloatArray,
    face_disp: FloatArray,
    axis: Axis,
    order: int,
    *,
    multid: bool = False,
    ok: NDArray[np.bool_] | None = None,
) -> FloatArray:
    """
    Donor-reconstructed values at face fluxes.

    Order 2 evaluates the donor's limited linear profile at the centre of
    the swept region: ``a + S/2 (sgn(F) W - dt u_f)`` along ``axis``, or the
    least-squares plane at the same point when ``multid``. Where ``ok`` is
    False the value degrades to the donor mean.
    """
    donor = np.asarray(a[jd, id_], dtype=float)
    if order == 1:
        return donor.copy()
    if axis is Axis.X:
        along = 0.5 * (sign * g.wx[jd, id_] - face_disp)
        across = -g.disp_y[jd, id_]
    else:
        along = 0.5 * (sign * g.wy[jd, id_] - face_disp)
        across = -g.disp_x[jd, id_]
    if multid:
        gx, gy = multid_gradients(a, g, jd, id_)
        if axis is Axis.X:
            value = donor + gx * along + gy * across
        else:
            value = donor + gx * across + gy * along
    else:
        slope = slope_x(a, g, jd, id_) if axis is Axis.X else slope_y(a, g, jd, id_)
        value = donor + slope * along
    if ok is not None:
        value = np.where(ok, value, donor)
    return np.asarray(value)


def corner_values(
    a: FloatArray,
    g: StencilGeometry,
    jd: IntArray,
    id_: IntArray,
    sx: IntArray,
    sy: IntArray,
    kdx: FloatArray,
    kdy: FloatArray,
    scheme: CornerScheme,
    *,
    face_signs: bool = True,
    ok: NDArray[np.bool_] | None = None,
) -> FloatArray:
    """
    Donor-reconstructed values at corner fluxes.

    ``sx, sy`` in {-1, +1} give the corner direction seen from the donor;
    ``kdx, kdy`` are the corner displacements over the step. With
    ``face_signs`` the linear_xy terms take their signs from the adjacent
    face displacements instead of the corner direction. The linear_xy value
    is clipped to the range of its five-point cross.
    """
    donor = np.asarray(a[jd, id_], dtype=float)
    if scheme is CornerScheme.UPWIND:
        return donor.copy()
    if scheme is CornerScheme.AVG_MIN:
        value = np.minimum(donor, 0.5 * (donor + a[jd + sy, id_ + sx]))
    elif scheme is CornerScheme.LINEAR_XY:
        fdx = g.fdisp_x[jd, id_ + (sx > 0)]
        fdy = g.fdisp_y[jd + (sy > 0), id_]
        tx = np.sign(fdx) if face_signs else sx
        ty = np.sign(fdy) if face_signs else sy
        value = (
            donor
            + 0.5 * slope_x(a, g, jd, id_) * (tx * g.wx[jd, id_] - fdx)
            + 0.5 * slope_y(a, g, jd, id_) * (ty * g.wy[jd, id_] - fdy)
        )
        cross = np.stack([donor, a[jd, id_ - 1], a[jd, id_ + 1], a[jd - 1, id_], a[jd + 1, id_]])
        value = np.clip(value, cross.min(axis=0), cross.max(axis=0))
    elif scheme is CornerScheme.LINEAR_DIAG:
        v, v_perp = _diagonals(g)
        same = sx * sy > 0
        ex = v[0]
        ey = np.where(same, v[1], v_perp[1])
        slope = np.where(same, slope_diag(a, g, jd, id_), slope_antidiag(a, g, jd, id_))
        extent = g.wx[jd, id_] * abs(ex) + g.wy[jd, id_] * np.abs(ey)
        value = donor + slope * 0.5 * (sx * extent - (kdx * ex + kdy * ey))
    else:
        gx, gy = multid_gradients(a, g, jd, id_)
        value = (
            donor
            + gx * 0.5 * (sx * g.wx[jd, id_] - kdx)
            + gy * 0.5 * (sy * g.wy[jd, id_] - kdy)
        )
    if ok is not None:
        value = np.where(ok, value, donor)
    return np.asarray(value)


# ============================================================================
# Single-stencil forms
# ============================================================================


def face_value(
    order: int,
    a: tuple[float, float, float],
    xlag: tuple[float, float, float],
    dvol: float,
    u_face: float,
    dt: float,
    w_lag: float,
) -> float:
    """
    Value carried by one face flux, donor stencil ``a = (a_minus, a_donor, a_plus)``.

    Order 2: ``a_donor + 1/2 d (sgn(dVol) W - dt u_f)`` with the limited slope ``d``.
    """
    if order == 1:
        return float(a[1])
    slope = limited_gradient_1d(a[0], a[1], a[2], xlag[0], xlag[1], xlag[2])
    return float(a[1] + 0.5 * slope * (math.copysign(1.0, dvol) * w_lag - dt * u_face))


def _single_geometry(
    x: FloatArray | None,
    y: FloatArray | None,
    widths: tuple[float, float],
    spacing: tuple[float, float],
) -> StencilGeometry:
    hx, hy = spacing
    xx, yy = np.meshgrid(np.arange(-1.0, 2.0) * hx, np.arange(-1.0, 2.0) * hy)
    return StencilGeometry(
        x=xx if x is None else np.asarray(x, dtype=float),
        y=yy if y is None else np.asarray(y, dtype=float),
        wx=np.full((3, 3), widths[0]),
        wy=np.full((3, 3), widths[1]),
        disp_x=np.zeros((3, 3)),
        disp_y=np.zeros((3, 3)),
        fdisp_x=np.zeros((3, 4)),
        fdisp_y=np.zeros((4, 3)),
        hx=hx,
        hy=hy,
    )


_CENTRE = np.array([1], dtype=np.intp)


def corner_value(
    scheme: CornerScheme,
    a: FloatArray,
    sx: int,
    sy: int,
    *,
    x: FloatArray | None = None,
    y: FloatArray | None = None,
    widths: tuple[float, float] = (1.0, 1.0),
    spacing: tuple[float, float] = (1.0, 1.0),
    kinematics: tuple[float, float] = (0.0, 0.0),
) -> float:
    """
    Value carried by one corner flux from the donor at the centre of the 3x3 stencil ``a``.

    ``(sx, sy)`` is the corner direction seen from the donor; centroids
    default to a uniform grid with the given spacing.
    """
    g = _single_geometry(x, y, widths, spacing)
    value = corner_values(
        np.asarray(a, dtype=float),
        g,
        _CENTRE,
        _CENTRE,
        np.array([1 if sx > 0 else -1]),
        np.array([1 if sy > 0 else -1]),
        np.array([kinematics[0]]),
        np.array([kinematics[1]]),
        scheme,
        face_signs=False,
    )
    return float(value[0])


def multid_plane(
    a: FloatArray,
    x: FloatArray | None = None,
    y: FloatArray | None = None,
    *,
    spacing: tuple[float, float] = (1.0, 1.0),
    limit: bool = True,
) -> PlaneRecon:
    """Least-squares plane of the 3x3 stencil ``a``, limited unless ``limit`` is False."""
    g = _single_geometry(x, y, spacing, spacing)
    values = np.asarray(a, dtype=float)
    gx, gy = multid_gradients(values, g, _CENTRE, _CENTRE, limit=limit)
    return PlaneRecon(
        a0=float(values[1, 1]),
        gx=float(gx[0]),
        gy=float(gy[0]),
        center=(float(g.x[1, 1]), float(g.y[1, 1])),
    )
