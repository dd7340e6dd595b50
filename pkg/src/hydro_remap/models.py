"""
Data models for the Lagrange-remap hydrodynamics engine.

Contains all dataclasses and enums used throughout the application.
Cell fields are stored as ``(ny, nx)`` arrays indexed ``[j, i]``; node fields
as ``(ny + 1, nx + 1)`` arrays indexed ``[J, I]`` where node ``[J, I]`` is the
lower-left node of cell ``(i, j)``. Two-material fields carry a leading
material axis of length 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import pandas as pd
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]
BoolArray = NDArray[np.bool_]


class BoundaryKind(Enum):
    """Boundary condition applied on one side of the domain."""

    PERIODIC = "periodic"
    WALL = "wall"  # reflective: mirrored cells, normal velocity negated


class EosKind(Enum):
    """Equation of state families."""

    PERFECT = "perfect"
    STIFFENED = "stiffened"


class RemapKind(Enum):
    """Remap engines."""

    AD = "AD"  # alternate directions, X-Y on odd steps and Y-X on even steps
    DIRECT = "Direct"  # one pass, faces only
    DIRECT_CF = "DirectCF"  # one pass, faces and corners


class CornerScheme(Enum):
    """Reconstruction of cell values at corner fluxes (DirectCF only)."""

    UPWIND = "upwind"
    AVG_MIN = "avg_min"
    LINEAR_XY = "linear_xy"
    LINEAR_DIAG = "linear_diag"
    MULTID = "multid"


class SchemeKind(Enum):
    """Schemes whose one-step vorticity diffusion is analysed."""

    MYR_O1 = "MYR_o1"  # staggered scheme, first-order remap
    MYR_O2 = "MYR_o2"  # staggered scheme, second-order remap
    GLACE = "GLACE"  # cell-centred nodal solver
    BBC = "BBC"  # face-velocity scheme


class VortexKind(Enum):
    """Analytic vortex fields used by the curl analysis."""

    POINT = "point"
    IDEAL = "ideal"


class CurlLayout(Enum):
    """Placement of velocity samples around the curl contour."""

    NODE = "node"  # staggered: velocities at the four nodes of a cell
    CELL = "cell"  # centred: velocities at the four cells around a node
    FACE = "face"  # BBC: normal velocities at the four faces of a dual cell


class Axis(Enum):
    """Sweep direction of a face flux."""

    X = "x"
    Y = "y"


class OutputFormat(Enum):
    """Field dump formats."""

    CSV = "csv"
    VTK = "vtk"


class RegionShape(Enum):
    """Geometric predicates used to paint initial data."""

    ALL = "all"
    RECT = "rect"  # params (x_min, y_min, x_max, y_max)
    CIRCLE = "circle"  # params (x_center, y_center, radius)
    HALF_PLANE = "half_plane"  # params (x_max,): the region x < x_max


@dataclass(frozen=True)
class Mesh:
    """
    Fixed Eulerian orthogonal grid.

    Attributes:
        nx: Number of cells along x
        ny: Number of cells along y
        dx: Cell width along x (m)
        dy: Cell width along y (m)
        x0: Domain origin x (m)
        y0: Domain origin y (m)
        left, right, bottom, top: Boundary condition per side
    """

    nx: int
    ny: int
    dx: float
    dy: float
    x0: float = 0.0
    y0: float = 0.0
    left: BoundaryKind = BoundaryKind.PERIODIC
    right: BoundaryKind = BoundaryKind.PERIODIC
    bottom: BoundaryKind = BoundaryKind.PERIODIC
    top: BoundaryKind = BoundaryKind.PERIODIC

    def __post_init__(self) -> None:
        """Validate grid dimensions and boundary pairing."""
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"Mesh needs at least 3x3 cells, got {self.nx}x{self.ny}")
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError(f"Cell widths must be positive, got dx={self.dx}, dy={self.dy}")
        if (self.left is BoundaryKind.PERIODIC) != (self.right is BoundaryKind.PERIODIC):
            raise ValueError("Periodic boundaries must be paired: left and right differ")
        if (self.bottom is BoundaryKind.PERIODIC) != (self.top is BoundaryKind.PERIODIC):
            raise ValueError("Periodic boundaries must be paired: bottom and top differ")

    @classmethod
    def uniform(
        cls,
        nx: int,
        ny: int,
        lx: float,
        ly: float,
        *,
        x0: float = 0.0,
        y0: float = 0.0,
        boundary: BoundaryKind = BoundaryKind.PERIODIC,
    ) -> Mesh:
        """Build a mesh covering ``[x0, x0 + lx] x [y0, y0 + ly]`` with one boundary kind."""
        return cls(
            nx=nx,
            ny=ny,
            dx=lx / nx,
            dy=ly / ny,
            x0=x0,
            y0=y0,
            left=boundary,
            right=boundary,
            bottom=boundary,
            top=boundary,
        )

    @property
    def periodic_x(self) -> bool:
        return self.left is BoundaryKind.PERIODIC

    @property
    def periodic_y(self) -> bool:
        return self.bottom is BoundaryKind.PERIODIC

    @property
    def shape(self) -> tuple[int, int]:
        """Shape of a cell field."""
        return (self.ny, self.nx)

    @property
    def node_shape(self) -> tuple[int, int]:
        """Shape of a node field."""
        return (self.ny + 1, self.nx + 1)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def char_length(self) -> float:
        """Characteristic cell length L = sqrt(dx dy) used by the pseudo-viscosity."""
        return math.sqrt(self.dx * self.dy)

    @property
    def lx(self) -> float:
        return self.nx * self.dx

    @property
    def ly(self) -> float:
        return self.ny * self.dy

    def cell_centers(self) -> tuple[FloatArray, FloatArray]:
        """Cell centre coordinates as two ``(ny, nx)`` arrays."""
        xc = self.x0 + (np.arange(self.nx) + 0.5) * self.dx
        yc = self.y0 + (np.arange(self.ny) + 0.5) * self.dy
        xx, yy = np.meshgrid(xc, yc)
        return xx, yy

    def node_coords(self) -> tuple[FloatArray, FloatArray]:
        """Eulerian node coordinates as two ``(ny + 1, nx + 1)`` arrays."""
        xn = self.x0 + np.arange(self.nx + 1) * self.dx
        yn = self.y0 + np.arange(self.ny + 1) * self.dy
        xx, yy = np.meshgrid(xn, yn)
        return xx, yy

    def unique_nodes(self) -> tuple[slice, slice]:
        """Row and column slices selecting each physical node once."""
        rows = slice(0, self.ny) if self.periodic_y else slice(0, self.ny + 1)
        cols = slice(0, self.nx) if self.periodic_x else slice(0, self.nx + 1)
        return rows, cols

    def transposed(self) -> Mesh:
        """The same grid with the roles of x and y exchanged."""
        return Mesh(
            nx=self.ny,
            ny=self.nx,
            dx=self.dy,
            dy=self.dx,
            x0=self.y0,
            y0=self.x0,
            left=self.bottom,
            right=self.top,
            bottom=self.left,
            top=self.right,
        )

    def coarsened(self, divisor: int) -> Mesh:
        """Same domain with both cell counts divided by ``divisor`` (at least 3 cells)."""
        if divisor < 1:
            raise ValueError(f"Mesh divisor must be >= 1, got {divisor}")
        return self.resized(max(3, self.nx // divisor), max(3, self.ny // divisor))

    def resized(self, nx: int, ny: int) -> Mesh:
        """Same domain and boundaries discretised with ``nx x ny`` cells."""
        return replace(self, nx=nx, ny=ny, dx=self.lx / nx, dy=self.ly / ny)


@dataclass(frozen=True)
class EosModel:
    """
    Equation of state ``P = (gamma - 1) rho e - pi``.

    Attributes:
        kind: PERFECT or STIFFENED
        gamma: Adiabatic index (dimensionless, > 1)
        pi_const: Stiffness constant (Pa), 0 for a perfect gas
    """

    kind: EosKind = EosKind.PERFECT
    gamma: float = 1.4
    pi_const: float = 0.0

    def __post_init__(self) -> None:
        """Validate the EOS constants."""
        if self.gamma <= 1:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if self.pi_const < 0:
            raise ValueError(f"pi_const must be >= 0, got {self.pi_const}")
        if self.kind is EosKind.PERFECT and self.pi_const != 0:
            raise ValueError(f"A perfect gas has pi_const = 0, got {self.pi_const}")

    @classmethod
    def perfect(cls, gamma: float) -> EosModel:
        return cls(EosKind.PERFECT, gamma, 0.0)

    @classmethod
    def stiffened(cls, gamma: float, pi_const: float) -> EosModel:
        return cls(EosKind.STIFFENED, gamma, pi_const)

    def internal_energy(self, rho: FloatArray | float, p: FloatArray | float) -> FloatArray:
        """Specific internal energy giving pressure ``p`` at density ``rho``."""
        return np.asarray((np.asarray(p) + self.pi_const) / ((self.gamma - 1.0) * np.asarray(rho)))


@dataclass(frozen=True)
class PseudoViscosityParams:
    """
    Coefficients of the compression-only artificial viscosity.

    Attributes:
        a1: Linear coefficient (dimensionless)
        a2: Quadratic coefficient (dimensionless)
    """

    a1: float = 0.2
    a2: float = 1.0

    def __post_init__(self) -> None:
        if self.a1 < 0 or self.a2 < 0:
            raise ValueError(f"Viscosity coefficients must be >= 0, got a1={self.a1}, a2={self.a2}")


@dataclass
class MaterialFields:
    """
    Per-material partial fields of a two-material run.

    Attributes:
        eos: Equation of state of each material
        k: Volume fractions, shape (2, ny, nx)
        mass: Partial masses m_alpha (kg)
        e: Partial specific internal energies (J/kg)
        p: Partial pressures (Pa)
        normal: Interface normals, shape (2, ny, nx) holding (n_x, n_y); points
            from material 0 into material 1, zero in pure cells
        offset: Interface offset d (m) relative to the Eulerian cell centre
    """

    eos: tuple[EosModel, EosModel]
    k: FloatArray
    mass: FloatArray
    e: FloatArray
    p: FloatArray
    normal: FloatArray
    offset: FloatArray

    def copy(self) -> MaterialFields:
        """Create an independent copy."""
        return MaterialFields(
            eos=self.eos,
            k=self.k.copy(),
            mass=self.mass.copy(),
            e=self.e.copy(),
            p=self.p.copy(),
            normal=self.normal.copy(),
            offset=self.offset.copy(),
        )

    def mixed(self) -> BoolArray:
        """Cells holding both materials."""
        return np.asarray((self.k[0] > 0.0) & (self.k[0] < 1.0))


@dataclass
class State:
    """
    Eulerian state at the start of a time step.

    Node positions are the Eulerian node coordinates of ``mesh``.

    Attributes:
        mesh: The Eulerian grid
        eos: Equation of state of a single-material run (material 0 otherwise)
        rho, e, p, q: Cell density, specific internal energy, pressure, viscosity
        vol: Cell volumes (m^2 per unit depth)
        mass: Cell masses (kg)
        ux, uy: Node velocity components (m/s)
        materials: Partial fields for two-material runs, None otherwise
        step: Index n of the last completed step
        time: Physical time t (s)
    """

    mesh: Mesh
    eos: EosModel
    rho: FloatArray
    e: FloatArray
    p: FloatArray
    q: FloatArray
    vol: FloatArray
    mass: FloatArray
    ux: FloatArray
    uy: FloatArray
    materials: MaterialFields | None = None
    step: int = 0
    time: float = 0.0

    @property
    def is_multimat(self) -> bool:
        return self.materials is not None

    def copy(self) -> State:
        """Create an independent copy of the state."""
        return State(
            mesh=self.mesh,
            eos=self.eos,
            rho=self.rho.copy(),
            e=self.e.copy(),
            p=self.p.copy(),
            q=self.q.copy(),
            vol=self.vol.copy(),
            mass=self.mass.copy(),
            ux=self.ux.copy(),
            uy=self.uy.copy(),
            materials=None if self.materials is None else self.materials.copy(),
            step=self.step,
            time=self.time,
        )


@dataclass
class HalfStepState:
    """
    Predicted values at t^{n+1/2}.

    Attributes:
        xn, yn: Node positions x^{n+1/2}
        ux, uy: Node velocities u^{n+1/2}
        vol, rho, e, p: Cell values at n+1/2 (mass is frozen)
        q: Pseudo-viscosity Q^n used by both sub-stages
        mat_e, mat_p: Partial energies and pressures, two-material runs only
    """

    xn: FloatArray
    yn: FloatArray
    ux: FloatArray
    uy: FloatArray
    vol: FloatArray
    rho: FloatArray
    e: FloatArray
    p: FloatArray
    q: FloatArray
    mat_e: FloatArray | None = None
    mat_p: FloatArray | None = None


@dataclass
class LagrangianState:
    """
    State at the end of the Lagrangian phase, input of every remap engine.

    Attributes:
        mesh: Eulerian grid the remap projects back onto
        dt: Time step
        step: Index of the step being computed (1-based, drives AD parity)
        xn, yn: Lagrangian node positions x^{n+1,lag}
        ux, uy: Node velocities u^{n+1,lag}
        ux_half, uy_half: Node velocities u^{n+1/2} (they move the mesh)
        vol, rho, e, p, mass, q: Cell values at the end of the phase
        eos: Single-material EOS
        materials: Partial fields (fractions frozen), two-material runs only
    """

    mesh: Mesh
    dt: float
    step: int
    xn: FloatArray
    yn: FloatArray
    ux: FloatArray
    uy: FloatArray
    ux_half: FloatArray
    uy_half: FloatArray
    vol: FloatArray
    rho: FloatArray
    e: FloatArray
    p: FloatArray
    mass: FloatArray
    q: FloatArray
    eos: EosModel
    materials: MaterialFields | None = None


@dataclass(frozen=True)
class InterfaceLine:
    """
    Piecewise-linear interface inside a rectangular cell proxy.

    Material 0 occupies ``{x : n . (x - center) <= offset}``.

    Attributes:
        normal: Unit normal (n_x, n_y) pointing from material 0 into material 1
        offset: Signed distance d of the line from ``center`` (m)
        center: Reference point, the centre of the proxy rectangle
    """

    normal: tuple[float, float]
    offset: float
    center: tuple[float, float]

    def signed_distance(self, x: float, y: float) -> float:
        """Positive on the material 1 side."""
        nx, ny = self.normal
        return nx * (x - self.center[0]) + ny * (y - self.center[1]) - self.offset


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle ``[x_min, x_max] x [y_min, y_max]``."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def corners(self) -> list[tuple[float, float]]:
        """Vertices in counter-clockwise order."""
        return [
            (self.x_min, self.y_min),
            (self.x_max, self.y_min),
            (self.x_max, self.y_max),
            (self.x_min, self.y_max),
        ]


@dataclass(frozen=True)
class ReconConfig:
    """
    Reconstruction choices of the remap.

    Attributes:
        face_order: 1 (upwind) or 2 (Van Leer limited linear)
        corner_scheme: Corner reconstruction, consumed by DirectCF only
        interface_degrade: Order 2 only where the stencil is pure in the material
    """

    face_order: int = 2
    corner_scheme: CornerScheme = CornerScheme.LINEAR_DIAG
    interface_degrade: bool = True

    def __post_init__(self) -> None:
        if self.face_order not in (1, 2):
            raise ValueError(f"face_order must be 1 or 2, got {self.face_order}")


@dataclass(frozen=True)
class PlaneRecon:
    """
    Limited linear reconstruction ``a(x) = a0 + G . (x - center)`` on one cell.

    Attributes:
        a0: Cell mean
        gx, gy: Limited gradient (per unit length)
        center: Lagrangian centroid of the cell
    """

    a0: float
    gx: float
    gy: float
    center: tuple[float, float] = (0.0, 0.0)

    def evaluate(self, x: float, y: float) -> float:
        return self.a0 + self.gx * (x - self.center[0]) + self.gy * (y - self.center[1])


@dataclass
class FluxSet:
    """
    Signed volume fluxes of one remap pass.

    Face fluxes are positive along +x (+y). Corner fluxes are magnitudes whose
    direction is given by the sign pair (sx, sy) of the node displacement.
    Boxes hold the flux region ``(x_a, x_b, y_a, y_b)`` in end-of-step
    coordinates, stacked on a leading axis of length 4.

    Attributes:
        fx: X-face fluxes, shape (ny, nx + 1), or None
        fy: Y-face fluxes, shape (ny + 1, nx), or None
        corner: Corner fluxes dVol_p >= 0, shape (ny + 1, nx + 1), or None
        sx, sy: Direction signs of the corner fluxes
        kdx, kdy: Corner node displacements over the step
        fx_box, fy_box, corner_box: Flux regions
        mat_fx, mat_fy, mat_corner: Per-material partitions, shape (2, ...)
    """

    fx: FloatArray | None = None
    fy: FloatArray | None = None
    corner: FloatArray | None = None
    sx: FloatArray | None = None
    sy: FloatArray | None = None
    kdx: FloatArray | None = None
    kdy: FloatArray | None = None
    fx_box: FloatArray | None = None
    fy_box: FloatArray | None = None
    corner_box: FloatArray | None = None
    mat_fx: FloatArray | None = None
    mat_fy: FloatArray | None = None
    mat_corner: FloatArray | None = None

    @property
    def has_corners(self) -> bool:
        return self.corner is not None


@dataclass
class RemapDiagnostics:
    """
    Counters collected across remap passes.

    Attributes:
        max_fraction_violation: Largest pre-clip excursion of k outside [0, 1]
        capped_outflows: Donor cells whose partial outflow was capped
        snapped_cells: Mixed cells snapped to pure
    """

    max_fraction_violation: float = 0.0
    capped_outflows: int = 0
    snapped_cells: int = 0


@dataclass(frozen=True)
class VortexSpec:
    """
    Analytic vortex probing the discrete curl operators.

    Attributes:
        kind: POINT (u_theta = sigma0 / (2 pi r)) or IDEAL (u_theta = alpha0 r)
        sigma0: Circulation of the point vortex (m^2/s)
        omega0: Vorticity of the ideal vortex (1/s)
        dx: Cell width used to normalise the point vortex (m)
    """

    kind: VortexKind
    sigma0: float | None = None
    omega0: float | None = None
    dx: float = 1.0

    def __post_init__(self) -> None:
        if self.kind is VortexKind.POINT and self.sigma0 is None:
            raise ValueError("A point vortex needs sigma0")
        if self.kind is VortexKind.IDEAL and self.omega0 is None:
            raise ValueError("An ideal vortex needs omega0")
        if self.dx <= 0:
            raise ValueError(f"dx must be positive, got {self.dx}")

    @property
    def alpha0(self) -> float:
        """sigma0 / (2 pi dx^2) for a point vortex, omega0 / 2 for an ideal vortex."""
        if self.kind is VortexKind.POINT:
            assert self.sigma0 is not None
            return self.sigma0 / (2.0 * math.pi * self.dx**2)
        assert self.omega0 is not None
        return self.omega0 / 2.0

    def velocity(self, x: float, y: float) -> tuple[float, float]:
        """Velocity of the vortex centred at the origin."""
        r2 = x * x + y * y
        if self.kind is VortexKind.POINT:
            assert self.sigma0 is not None
            scale = self.sigma0 / (2.0 * math.pi * r2)
        else:
            scale = self.alpha0
        return (-scale * y, scale * x)


@dataclass(frozen=True)
class Region:
    """
    Initial data painted on a geometric region.

    Attributes:
        shape: Geometric predicate
        params: Shape parameters (see RegionShape)
        rho: Density (kg/m^3)
        p: Pressure (Pa)
        ux, uy: Velocity (m/s)
        material: Material index (0 or 1)
    """

    shape: RegionShape
    params: tuple[float, ...] = ()
    rho: float = 1.0
    p: float = 1.0
    ux: float = 0.0
    uy: float = 0.0
    material: int = 0

    def __post_init__(self) -> None:
        expected = {
            RegionShape.ALL: 0,
            RegionShape.RECT: 4,
            RegionShape.CIRCLE: 3,
            RegionShape.HALF_PLANE: 1,
        }[self.shape]
        if len(self.params) != expected:
            raise ValueError(
                f"{self.shape.value} region takes {expected} parameters, got {len(self.params)}"
            )
        if self.rho <= 0:
            raise ValueError(f"Region density must be positive, got {self.rho}")
        if self.material not in (0, 1):
            raise ValueError(f"Material index must be 0 or 1, got {self.material}")

    def contains(self, x: FloatArray, y: FloatArray) -> BoolArray:
        """Membership of points."""
        if self.shape is RegionShape.ALL:
            return np.ones(np.shape(x), dtype=bool)
        if self.shape is RegionShape.RECT:
            x_min, y_min, x_max, y_max = self.params
            return np.asarray((x >= x_min) & (x <= x_max) & (y >= y_min) & (y <= y_max))
        if self.shape is RegionShape.CIRCLE:
            cx, cy, radius = self.params
            return np.asarray((x - cx) ** 2 + (y - cy) ** 2 <= radius**2)
        return np.asarray(x < self.params[0])


@dataclass(frozen=True)
class CaseSpec:
    """
    Benchmark definition.

    Attributes:
        name: Case identifier
        mesh: Eulerian grid
        eos: One EOS per material (length 1 or 2)
        regions: Painted regions, later ones drawn over earlier ones; the first covers all
        end_time: Final time T (s)
        cfl: CFL number
        scheme: Remap engine
        recon: Reconstruction choices
        viscosity: Pseudo-viscosity coefficients
        rotation_omega: Imposed solid-rotation rate (1/s); skips the Lagrange phase
        rotation_center: Centre of the imposed rotation
        reverse_time: Time at which the node velocities are reversed once
        snapshot_times: Times at which the engine keeps a copy of the state
        description: One-line description
    """

    name: str
    mesh: Mesh
    eos: tuple[EosModel, ...]
    regions: tuple[Region, ...]
    end_time: float
    cfl: float = 0.3
    scheme: RemapKind = RemapKind.DIRECT_CF
    recon: ReconConfig = field(default_factory=ReconConfig)
    viscosity: PseudoViscosityParams = field(default_factory=PseudoViscosityParams)
    rotation_omega: float | None = None
    rotation_center: tuple[float, float] = (0.5, 0.5)
    reverse_time: float | None = None
    snapshot_times: tuple[float, ...] = ()
    description: str = ""

    def __post_init__(self) -> None:
        if len(self.eos) not in (1, 2):
            raise ValueError(f"A case has one or two materials, got {len(self.eos)}")
        if not self.regions or self.regions[0].shape is not RegionShape.ALL:
            raise ValueError("The first region must cover the whole domain")
        if any(r.material >= len(self.eos) for r in self.regions):
            raise ValueError("Region material index exceeds the number of materials")
        if self.end_time <= 0:
            raise ValueError(f"end_time must be positive, got {self.end_time}")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")

    @property
    def multimat(self) -> bool:
        return len(self.eos) == 2

    @property
    def prescribed_velocity(self) -> bool:
        return self.rotation_omega is not None


@dataclass(frozen=True)
class StepTotals:
    """Conserved totals and extrema after one step."""

    step: int
    time: float
    dt: float
    mass: float
    momentum_x: float
    momentum_y: float
    internal_energy: float
    kinetic_energy: float
    material_mass: tuple[float, ...] = ()
    rho_min: float = 0.0
    rho_max: float = 0.0
    p_min: float = 0.0
    p_max: float = 0.0


@dataclass
class RunReport:
    """
    Outcome of one simulation run.

    Attributes:
        case_name: Name of the case
        scheme: Remap engine used
        history: Totals recorded after every step (entry 0 is the initial state)
        initial_state, final_state: First and last Eulerian states
        snapshots: States kept at requested times
        l2_rho: L2 distance between final and initial density
        l2_k: L2 distance between final and initial material-1 fraction
        wall_time: Elapsed wall-clock time (s)
        steps: Number of steps taken
        max_fraction_violation: Largest pre-clip excursion of k outside [0, 1]
    """

    case_name: str
    scheme: RemapKind
    history: list[StepTotals] = field(default_factory=list)
    initial_state: State | None = None
    final_state: State | None = None
    snapshots: dict[float, State] = field(default_factory=dict)
    l2_rho: float | None = None
    l2_k: float | None = None
    wall_time: float = 0.0
    steps: int = 0
    max_fraction_violation: float = 0.0

    @property
    def mass_drift(self) -> float:
        """Relative change of the total mass over the run."""
        if not self.history:
            return 0.0
        first, last = self.history[0].mass, self.history[-1].mass
        return abs(last - first) / abs(first)

    @property
    def material_mass_drift(self) -> tuple[float, ...]:
        """Relative change of each material mass over the run."""
        if not self.history or not self.history[0].material_mass:
            return ()
        first, last = self.history[0].material_mass, self.history[-1].material_mass
        return tuple(abs(b - a) / abs(a) if a else abs(b) for a, b in zip(first, last, strict=True))


@dataclass
class ConvergenceStudy:
    """
    Errors of one case over a sequence of meshes.

    Attributes:
        case_name: Name of the case
        table: One row per (scheme, mesh) with columns scheme, nx, ny, dx,
            l2_rho, l2_k, steps, mass_drift
        slopes: Least-squares log-log slope of l2_rho against dx per scheme
    """

    case_name: str
    table: pd.DataFrame
    slopes: dict[str, float] = field(default_factory=dict)


@dataclass
class RunConfig:
    """
    Run configuration read from a ``key = value`` file.

    Attributes:
        case: Case name
        scheme: Remap engine
        face_order: Face reconstruction order
        corner_scheme: Corner reconstruction of DirectCF
        interface_degrade: Degrade to order 1 near mixed cells
        cfl: CFL number
        divisor: Mesh divisor for desk runs
        resolution: Explicit (nx, ny) overriding the case mesh
        end_time: Override of the case end time (s)
        output_dir: Directory receiving dumps and logs
        output_every: Dump cadence in steps (0: final state only)
        output_format: Field dump format
        seed: Seed of randomised suites
        a1, a2: Pseudo-viscosity coefficients
        log_level: Loguru level of the stderr sink
    """

    case: str = "mono_advect"
    scheme: RemapKind = RemapKind.DIRECT_CF
    face_order: int = 2
    corner_scheme: CornerScheme = CornerScheme.LINEAR_DIAG
    interface_degrade: bool = True
    cfl: float = 0.3
    divisor: int = 1
    resolution: tuple[int, int] | None = None
    end_time: float | None = None
    output_dir: str = "output"
    output_every: int = 0
    output_format: OutputFormat = OutputFormat.CSV
    seed: int = 0
    a1: float = 0.2
    a2: float = 1.0
    log_level: str = "INFO"

    def __post_init__(self) -> None:
        """Validate numeric settings."""
        if self.face_order not in (1, 2):
            raise ValueError(f"face_order must be 1 or 2, got {self.face_order}")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.divisor < 1:
            raise ValueError(f"divisor must be >= 1, got {self.divisor}")
        if self.end_time is not None and self.end_time <= 0:
            raise ValueError(f"end_time must be positive, got {self.end_time}")
        if self.output_every < 0:
            raise ValueError(f"output_every must be >= 0, got {self.output_every}")
        if self.a1 < 0 or self.a2 < 0:
            raise ValueError(f"a1 and a2 must be >= 0, got a1={self.a1}, a2={self.a2}")

    @property
    def recon(self) -> ReconConfig:
        return ReconConfig(self.face_order, self.corner_scheme, self.interface_degrade)

    @property
    def viscosity(self) -> PseudoViscosityParams:
        return PseudoViscosityParams(self.a1, self.a2)
