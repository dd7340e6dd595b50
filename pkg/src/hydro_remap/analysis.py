"""
Closed-form oracles for the remap and vorticity analyses.

Three groups live here:

* first-order linear advection on a 3x3 stencil,
* the one-node displacement series (Lagrangian volume and corner mass
  flux of the cell whose upper-right node moves along the diagonal),
* discrete curls on the staggered, cell-centred and face-velocity layouts,
  and the one-step ratios of the curl of a vortex after and before a step.

The vortex updates are the closed-form one-step velocities of each scheme
evaluated on a single contour; no full cell-centred or face-velocity solver
is time-marched.
"""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np
import pandas as pd

from .geometry import Point, clip_halfplane, shoelace_area
from .lagrange import prescribed_lagrange_step
from .mesh_state import initial_state
from .models import (
    Axis,
    CornerScheme,
    CurlLayout,
    EosModel,
    FloatArray,
    Mesh,
    ReconConfig,
    RemapKind,
    SchemeKind,
    VortexKind,
    VortexSpec,
)
from .remap import ad_flux_set, cf_flux_set, direct_flux_set, lagrangian_volumes, remap

Sampler = Callable[[float, float], tuple[float, float]]

# Largest alpha0 dt for which the face-velocity point-vortex ratio stays >= 0
BBC_STABILITY_BOUND = 25.0 / 48.0

_LAYOUTS = {
    SchemeKind.MYR_O1: CurlLayout.NODE,
    SchemeKind.MYR_O2: CurlLayout.NODE,
    SchemeKind.GLACE: CurlLayout.CELL,
    SchemeKind.BBC: CurlLayout.FACE,
}


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"Displacement must lie in (0, 1), got {eps}")


# =============================================================================
# First-order advection
# =============================================================================


def linadv_o1_update(a: FloatArray, eps_x: float, eps_y: float) -> float:
    """
    Centre value of a 3x3 stencil ``a[j, i]`` after one first-order upwind step.

    The velocity points along +x and +y; ``eps_x`` and ``eps_y`` are the
    Courant numbers. The four weights are the corner weights of two
    successive one-dimensional upwind updates.
    """
    for name, eps in (("eps_x", eps_x), ("eps_y", eps_y)):
        if not 0.0 <= eps <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {eps}")
    a = np.asarray(a, dtype=float)
    return float(
        a[1, 1] * (1.0 - eps_x) * (1.0 - eps_y)
        + a[1, 0] * eps_x * (1.0 - eps_y)
        + a[0, 1] * eps_y * (1.0 - eps_x)
        + a[0, 0] * eps_x * eps_y
    )


# =============================================================================
# One-node displacement
# =============================================================================


def _one_node_velocities(
    mesh: Mesh, eps: float, eps_prime: float = 0.0
) -> tuple[FloatArray, FloatArray]:
    """Node (2, 2) moves by ``(eps, eps)`` and node (2, 3) by ``(eps_prime, eps_prime)``."""
    ux = np.zeros(mesh.node_shape)
    uy = np.zeros(mesh.node_shape)
    ux[2, 2] = uy[2, 2] = eps
    ux[2, 3] = uy[2, 3] = eps_prime
    return ux, uy


def _cf_one_node(eps: float) -> tuple[float, float]:
    """
    Corner-flux remap of a unit periodic mesh where node (2, 2) moves by
    (eps, eps) in unit time: Lagrangian volume of cell (1, 1) and the corner
    volume at its moving node.
    """
    mesh = Mesh.uniform(4, 4, 4.0, 4.0)
    ux, uy = _one_node_velocities(mesh, eps)
    fluxes = cf_flux_set(ux, uy, 1.0, mesh)
    assert fluxes.corner is not None
    vol = lagrangian_volumes(mesh, fluxes)
    return float(vol[1, 1]), float(fluxes.corner[2, 2])


def _ad_one_node_volume(eps: float) -> float:
    """
    Product of the X-pass volume of cell (1, 1) and the Y-pass volume of
    cell (2, 1), the two Lagrangian cells its diagonal mass goes through.
    """
    mesh = Mesh.uniform(4, 4, 4.0, 4.0)
    ux, uy = _one_node_velocities(mesh, eps)
    vol_x = lagrangian_volumes(mesh, ad_flux_set(ux, uy, 1.0, mesh, Axis.X))
    vol_y = lagrangian_volumes(mesh, ad_flux_set(ux, uy, 1.0, mesh, Axis.Y))
    return float(vol_x[1, 1] * vol_y[1, 2])


def _ad_one_node_mass(eps: float, eps_prime: float) -> float:
    """
    Share of the mass of cell (1, 1) that a first-order X-then-Y remap
    delivers to cell (2, 2).

    The remap is linear in the cell masses, so the share is the difference
    between a run with one extra unit of mass in cell (1, 1) and a run
    without it.
    """
    mesh = Mesh.uniform(4, 4, 4.0, 4.0)
    ux, uy = _one_node_velocities(mesh, eps, eps_prime)
    recon = ReconConfig(face_order=1, corner_scheme=CornerScheme.UPWIND)
    received = []
    for extra in (0.0, 1.0):
        rho = np.ones(mesh.shape)
        rho[1, 1] += extra
        state = initial_state(mesh, EosModel.perfect(1.4), rho, np.ones(mesh.shape), ux, uy)
        lag = prescribed_lagrange_step(state, ux, uy, 1.0)
        received.append(float(remap(RemapKind.AD, lag, recon).mass[2, 2]))
    return (received[1] - received[0]) / mesh.cell_area


def deformed_cell(eps: float) -> list[Point]:
    """Unit cell whose upper-right node moved by ``(eps, eps)``, counter-clockwise."""
    return [(0.0, 0.0), (1.0, 0.0), (1.0 + eps, 1.0 + eps), (0.0, 1.0)]


def exact_corner_polygon(eps: float) -> list[Point]:
    """Part of the deformed unit cell that lies in its upper-right neighbour."""
    clipped = clip_halfplane(deformed_cell(eps), (-1.0, 0.0), (1.0, 0.0), 0.0)
    return clip_halfplane(clipped, (0.0, -1.0), (0.0, 1.0), 0.0)


def single_node_lag_volume(kind: RemapKind | None, eps: float, *, truncated: bool = False) -> float:
    """
    Lagrangian volume (in units of dx^2) seen by each remap when the
    upper-right node of a unit cell moves by ``(eps, eps)``.

    Args:
        kind: Remap variant, or None for the exact deformed cell
        eps: Node displacement in cell widths, in (0, 1)
        truncated: Return the series cut after the cubic term

    Every remap value is computed from the fluxes of the engine. The
    alternate-direction volume is the product of the two pass volumes the
    diagonal mass goes through. The series are ``1 + eps + eps^2/4``
    (alternate directions), ``1 + eps`` (direct) and ``1 + eps + eps^3``
    (corner flux).
    """
    _check_eps(eps)
    if kind is None:
        return shoelace_area(deformed_cell(eps))
    if truncated:
        if kind is RemapKind.AD:
            return 1.0 + eps + 0.25 * eps**2
        if kind is RemapKind.DIRECT:
            return 1.0 + eps
        return 1.0 + eps + eps**3
    if kind is RemapKind.AD:
        return _ad_one_node_volume(eps)
    if kind is RemapKind.DIRECT:
        mesh = Mesh.uniform(4, 4, 4.0, 4.0)
        ux, uy = _one_node_velocities(mesh, eps)
        return float(lagrangian_volumes(mesh, direct_flux_set(ux, uy, 1.0, mesh))[1, 1])
    return _cf_one_node(eps)[0]


def single_node_corner_mass(
    kind: RemapKind | None, eps: float, eps_prime: float = 0.0, *, truncated: bool = False
) -> float:
    """
    Relative mass ``dm/m`` passed to the diagonal neighbour through the moving node.

    Args:
        kind: Remap variant, or None for the exact deformed cell
        eps: Displacement of the moving node, in (0, 1)
        eps_prime: Displacement of the node to its right; only the
            alternate-direction remap depends on it
        truncated: Return the series cut after the cubic term

    The exact value is the clipped deformed polygon area times the
    Lagrangian density, ``eps^2 / (1 + eps)^2``. The alternate-direction
    value comes from a first-order X-then-Y remap and equals
    ``a b / ((1 + a)(1 + b))`` with ``a = eps/2`` and ``b = (eps + eps')/2``.
    """
    _check_eps(eps)
    if not 0.0 <= eps_prime < 1.0:
        raise ValueError(f"Displacement must lie in [0, 1), got {eps_prime}")
    if kind is RemapKind.DIRECT:
        return 0.0
    if kind is RemapKind.AD:
        if truncated:
            return (
                0.25 * eps**2
                + 0.25 * eps * eps_prime
                - 0.25 * (eps**3 + eps * eps_prime**2 + eps_prime * eps**2)
            )
        return _ad_one_node_mass(eps, eps_prime)
    if kind is None:
        if truncated:
            return eps**2 - 2.0 * eps**3
        area = abs(shoelace_area(exact_corner_polygon(eps)))
        return area / shoelace_area(deformed_cell(eps))
    if truncated:
        return eps**2 - eps**3
    vol, corner = _cf_one_node(eps)
    return corner / vol


# =============================================================================
# Discrete curls
# =============================================================================


def scheme_layout(scheme: SchemeKind) -> CurlLayout:
    """Velocity placement of ``scheme``."""
    return _LAYOUTS[scheme]


def curl_sites(layout: CurlLayout, h: float) -> list[Point]:
    """Counter-clockwise velocity sites of the contour around the origin."""
    if layout is CurlLayout.FACE:
        return [(0.5 * h, 0.0), (0.0, 0.5 * h), (-0.5 * h, 0.0), (0.0, -0.5 * h)]
    return [(-0.5 * h, -0.5 * h), (0.5 * h, -0.5 * h), (0.5 * h, 0.5 * h), (-0.5 * h, 0.5 * h)]


def discrete_curl(layout: CurlLayout, sampler: Sampler, h: float) -> float:
    """
    Circulation over area of the contour around the origin.

    Node and cell layouts interpolate linearly along each side of the square
    through their four sites; the face layout uses the normal velocity of
    each face of the square of side ``h``.
    """
    if h <= 0:
        raise ValueError(f"Contour size must be positive, got {h}")
    sites = curl_sites(layout, h)
    u = [sampler(x, y) for x, y in sites]
    if layout is CurlLayout.FACE:
        return (u[0][1] - u[1][0] - u[2][1] + u[3][0]) / h
    circulation = 0.0
    for p in range(4):
        q = (p + 1) % 4
        tx = (sites[q][0] - sites[p][0]) / h
        ty = (sites[q][1] - sites[p][1]) / h
        circulation += (u[p][0] + u[q][0]) * tx + (u[p][1] + u[q][1]) * ty
    return circulation / (2.0 * h)


def reference_site(layout: CurlLayout, h: float) -> Point:
    """Site at which the one-step velocity formulas are stated."""
    if layout is CurlLayout.FACE:
        return (0.5 * h, 0.0)
    return (0.5 * h, -0.5 * h)


def boxed_velocity(scheme: SchemeKind, vortex: VortexSpec, a0dt: float, cfl_term: float = 0.0) -> Point:
    """
    Velocity after one step at the reference site of ``scheme``.

    ``a0dt`` is ``alpha0 dt`` and ``cfl_term`` is ``c0 dt / dx``; the second
    only enters the centred scheme near a point vortex.
    """
    if a0dt < 0 or cfl_term < 0:
        raise ValueError(f"a0dt and cfl_term must be non-negative, got {a0dt}, {cfl_term}")
    a0h = vortex.alpha0 * vortex.dx
    b = a0dt
    if vortex.kind is VortexKind.POINT:
        if scheme is SchemeKind.MYR_O1:
            return a0h * (1.0 + 68.0 / 75.0 * b), a0h * (1.0 - 68.0 / 75.0 * b)
        if scheme is SchemeKind.MYR_O2:
            return a0h * (1.0 + 34.0 / 75.0 * b), a0h * (1.0 - 34.0 / 75.0 * b)
        if scheme is SchemeKind.GLACE:
            damp = 1.0 - 4.0 / 3.0 * cfl_term
            return a0h * (damp - 8.0 / 75.0 * b), a0h * (damp - 76.0 / 75.0 * b)
        return 0.0, 2.0 * a0h * (1.0 - 48.0 / 25.0 * b)
    if scheme is SchemeKind.MYR_O1:
        return 0.5 * a0h * (1.0 + 2.0 * b), 0.5 * a0h * (1.0 - 2.0 * b)
    if scheme is SchemeKind.BBC:
        return 0.0, 0.5 * a0h
    return 0.5 * a0h * (1.0 + b), 0.5 * a0h * (1.0 - b)


def rotational_field(site: Point, velocity: Point) -> Sampler:
    """
    Field invariant under quarter turns that takes ``velocity`` at ``site``.

    Only defined on the four images of ``site``.
    """
    base = math.atan2(site[1], site[0])

    def sample(x: float, y: float) -> tuple[float, float]:
        turns = round((math.atan2(y, x) - base) / (0.5 * math.pi)) % 4
        ux, uy = velocity
        for _ in range(turns):
            ux, uy = -uy, ux
        return ux, uy

    return sample


def one_step_curl_ratio(
    scheme: SchemeKind, vortex: VortexSpec, a0dt: float, cfl_term: float = 0.0
) -> float:
    """
    Discrete curl after one step divided by the curl of the initial vortex.

    The post-step field is the rotationally symmetric extension of the
    one-step velocity at the reference site. A ratio below 1 means the
    scheme diffuses vorticity.
    """
    layout = scheme_layout(scheme)
    h = vortex.dx
    site = reference_site(layout, h)
    after = discrete_curl(layout, rotational_field(site, boxed_velocity(scheme, vortex, a0dt, cfl_term)), h)
    before = discrete_curl(layout, vortex.velocity, h)
    return after / before


def bbc_stability_bound() -> float:
    """Largest ``alpha0 dt`` keeping the face-velocity point-vortex ratio non-negative."""
    return BBC_STABILITY_BOUND


def diffusion_crossover_cfl(a0dt: float) -> float:
    """CFL term below which the centred scheme keeps more point-vortex curl than BBC."""
    if a0dt <= 0:
        raise ValueError(f"a0dt must be positive, got {a0dt}")
    return 51.0 / 50.0 * a0dt


def bbc_vs_glace_crossover(a0dt: float) -> float:
    """
    Crossover CFL between the centred and face-velocity schemes, taken at
    the face-velocity stability bound.

    Constant whatever ``a0dt``: the comparison is made at ``alpha0 dt = 25/48``.
    """
    if a0dt <= 0:
        raise ValueError(f"a0dt must be positive, got {a0dt}")
    return diffusion_crossover_cfl(BBC_STABILITY_BOUND)


def ratio_table(a0dt: float, cfl_term: float) -> pd.DataFrame:
    """One-step curl ratios of every scheme for both vortex kinds."""
    point = VortexSpec(kind=VortexKind.POINT, sigma0=2.0 * math.pi)
    ideal = VortexSpec(kind=VortexKind.IDEAL, omega0=2.0)
    rows = [
        {
            "scheme": scheme.value,
            "layout": scheme_layout(scheme).value,
            "point": one_step_curl_ratio(scheme, point, a0dt, cfl_term),
            "ideal": one_step_curl_ratio(scheme, ideal, a0dt, cfl_term),
        }
        for scheme in SchemeKind
    ]
    return pd.DataFrame(rows)


# =============================================================================
# First-order remap equivalence
# =============================================================================


def first_order_remap_gap(
    n: int = 32, seed: int = 0, velocity: Point = (0.7, 0.4), courant: float = 0.5
) -> float:
    """
    Largest density difference between the alternate-direction and the
    corner-flux remaps of one translation step of a random periodic field.

    Both remaps run at first order with upwind corners, where they coincide.
    """
    rng = np.random.default_rng(seed)
    mesh = Mesh.uniform(n, n, 1.0, 1.0)
    rho = rng.uniform(0.5, 1.5, mesh.shape)
    ux = np.full(mesh.node_shape, velocity[0])
    uy = np.full(mesh.node_shape, velocity[1])
    state = initial_state(mesh, EosModel.perfect(1.4), rho, np.ones(mesh.shape), ux, uy)
    dt = courant * mesh.dx / max(abs(velocity[0]), abs(velocity[1]))
    lag = prescribed_lagrange_step(state, ux, uy, dt)
    recon = ReconConfig(face_order=1, corner_scheme=CornerScheme.UPWIND)
    by_axes = remap(RemapKind.AD, lag, recon)
    by_corners = remap(RemapKind.DIRECT_CF, lag, recon)
    return float(np.max(np.abs(by_axes.rho - by_corners.rho)))
