"""
Unit tests for the data models and the exception hierarchy.

Tests the computed properties and validation logic in models.py and the
location formatting of errors.py.
"""

import math

import numpy as np
import pytest

from hydro_remap.errors import ConfigError, HydroError, TangledCellError, first_index
from hydro_remap.models import (
    BoundaryKind,
    CaseSpec,
    EosKind,
    EosModel,
    Mesh,
    PseudoViscosityParams,
    ReconConfig,
    Region,
    RegionShape,
    RemapKind,
    RunConfig,
    RunReport,
    StepTotals,
    VortexKind,
    VortexSpec,
)


class TestMesh:
    """Tests for the Mesh dataclass."""

    def test_uniform_spacing(self):
        """Cell widths come from the domain size."""
        mesh = Mesh.uniform(10, 5, 2.0, 1.0)
        assert mesh.dx == pytest.approx(0.2)
        assert mesh.dy == pytest.approx(0.2)
        assert mesh.shape == (5, 10)
        assert mesh.node_shape == (6, 11)
        assert mesh.cell_area == pytest.approx(0.04)

    def test_rejects_tiny_mesh(self):
        """Fewer than 3 cells along an axis is rejected."""
        with pytest.raises(ValueError, match="at least 3x3"):
            Mesh.uniform(2, 8, 1.0, 1.0)

    def test_rejects_non_positive_width(self):
        """Zero cell width is rejected."""
        with pytest.raises(ValueError, match="positive"):
            Mesh(nx=4, ny=4, dx=0.0, dy=1.0)

    def test_rejects_unpaired_periodic_sides(self):
        """A periodic side needs a periodic opposite side."""
        with pytest.raises(ValueError, match="paired"):
            Mesh(nx=4, ny=4, dx=1.0, dy=1.0, left=BoundaryKind.WALL)

    def test_coarsened_keeps_domain(self):
        """Dividing the cell counts keeps the domain size."""
        mesh = Mesh.uniform(1000, 90, 10.0, 0.09, boundary=BoundaryKind.WALL)
        coarse = mesh.coarsened(4)
        assert (coarse.nx, coarse.ny) == (250, 22)
        assert coarse.lx == pytest.approx(10.0)
        assert coarse.ly == pytest.approx(0.09)
        assert not coarse.periodic_x

    def test_coarsened_rejects_zero_divisor(self):
        """Divisor must be at least 1."""
        with pytest.raises(ValueError, match="divisor"):
            Mesh.uniform(8, 8, 1.0, 1.0).coarsened(0)

    def test_transposed_swaps_axes(self):
        """Transposing swaps counts, widths and boundary roles."""
        mesh = Mesh(nx=4, ny=6, dx=0.5, dy=0.25, left=BoundaryKind.WALL, right=BoundaryKind.WALL)
        t = mesh.transposed()
        assert (t.nx, t.ny, t.dx, t.dy) == (6, 4, 0.25, 0.5)
        assert t.periodic_x
        assert not t.periodic_y

    def test_unique_nodes_drop_periodic_duplicate(self):
        """Periodic meshes count each node once."""
        rows, cols = Mesh.uniform(4, 5, 1.0, 1.0).unique_nodes()
        assert (rows.stop, cols.stop) == (5, 4)
        rows, cols = Mesh.uniform(4, 5, 1.0, 1.0, boundary=BoundaryKind.WALL).unique_nodes()
        assert (rows.stop, cols.stop) == (6, 5)

    def test_cell_centers(self):
        """Cell centres sit half a cell inside the origin."""
        xc, yc = Mesh.uniform(4, 4, 1.0, 1.0, x0=1.0).cell_centers()
        assert xc[0, 0] == pytest.approx(1.125)
        assert yc[3, 0] == pytest.approx(0.875)


class TestEosModel:
    """Tests for the EosModel dataclass."""

    def test_perfect_internal_energy(self):
        """e = P / ((gamma - 1) rho)."""
        assert float(EosModel.perfect(1.4).internal_energy(1.0, 1e5)) == pytest.approx(2.5e5)

    def test_stiffened_internal_energy(self):
        """e = (P + pi) / ((gamma - 1) rho)."""
        water = EosModel.stiffened(7.0, 2.1e9)
        assert float(water.internal_energy(1000.0, 1e5)) == pytest.approx((1e5 + 2.1e9) / 6000.0)

    def test_rejects_gamma_below_one(self):
        with pytest.raises(ValueError, match="gamma"):
            EosModel.perfect(1.0)

    def test_perfect_gas_has_no_stiffness(self):
        """A perfect gas with pi != 0 is rejected."""
        with pytest.raises(ValueError, match="pi_const"):
            EosModel(EosKind.PERFECT, 1.4, 10.0)


class TestSmallConfigs:
    """Validation of the small parameter dataclasses."""

    def test_viscosity_rejects_negative(self):
        with pytest.raises(ValueError, match="a1=-1"):
            PseudoViscosityParams(a1=-1.0)

    def test_recon_rejects_third_order(self):
        with pytest.raises(ValueError, match="face_order"):
            ReconConfig(face_order=3)

    def test_point_vortex_alpha0(self):
        """alpha0 = sigma0 / (2 pi dx^2)."""
        vortex = VortexSpec(VortexKind.POINT, sigma0=2.0 * math.pi, dx=0.5)
        assert vortex.alpha0 == pytest.approx(4.0)

    def test_ideal_vortex_alpha0(self):
        """alpha0 = omega0 / 2."""
        assert VortexSpec(VortexKind.IDEAL, omega0=3.0).alpha0 == pytest.approx(1.5)

    def test_vortex_requires_strength(self):
        with pytest.raises(ValueError, match="sigma0"):
            VortexSpec(VortexKind.POINT)


class TestRegion:
    """Tests for region predicates."""

    def test_rect_contains(self):
        region = Region(RegionShape.RECT, (0.0, 0.0, 1.0, 2.0))
        x = np.array([0.5, 1.5])
        y = np.array([1.0, 1.0])
        assert region.contains(x, y).tolist() == [True, False]

    def test_circle_contains(self):
        region = Region(RegionShape.CIRCLE, (0.0, 0.0, 1.0))
        assert region.contains(np.array([0.6]), np.array([0.6])).tolist() == [True]
        assert region.contains(np.array([0.8]), np.array([0.8])).tolist() == [False]

    def test_half_plane_contains(self):
        region = Region(RegionShape.HALF_PLANE, (0.6,))
        assert region.contains(np.array([0.5, 0.7]), np.zeros(2)).tolist() == [True, False]

    def test_wrong_parameter_count(self):
        with pytest.raises(ValueError, match="takes 3 parameters"):
            Region(RegionShape.CIRCLE, (0.0, 0.0))


class TestCaseSpec:
    """Validation of benchmark definitions."""

    def _mesh(self):
        return Mesh.uniform(4, 4, 1.0, 1.0)

    def test_first_region_must_cover_domain(self):
        with pytest.raises(ValueError, match="whole domain"):
            CaseSpec(
                name="bad",
                mesh=self._mesh(),
                eos=(EosModel.perfect(1.4),),
                regions=(Region(RegionShape.RECT, (0.0, 0.0, 0.5, 0.5)),),
                end_time=1.0,
            )

    def test_material_index_checked(self):
        with pytest.raises(ValueError, match="material index"):
            CaseSpec(
                name="bad",
                mesh=self._mesh(),
                eos=(EosModel.perfect(1.4),),
                regions=(Region(RegionShape.ALL), Region(RegionShape.ALL, material=1)),
                end_time=1.0,
            )

    def test_multimat_flag(self):
        case = CaseSpec(
            name="ok",
            mesh=self._mesh(),
            eos=(EosModel.perfect(1.4), EosModel.perfect(1.66)),
            regions=(Region(RegionShape.ALL),),
            end_time=1.0,
        )
        assert case.multimat
        assert not case.prescribed_velocity


class TestRunReport:
    """Tests for derived run metrics."""

    def _totals(self, mass, materials=()):
        return StepTotals(
            step=0,
            time=0.0,
            dt=0.0,
            mass=mass,
            momentum_x=0.0,
            momentum_y=0.0,
            internal_energy=0.0,
            kinetic_energy=0.0,
            material_mass=materials,
        )

    def test_mass_drift(self):
        report = RunReport(
            case_name="x", scheme=RemapKind.AD, history=[self._totals(2.0), self._totals(2.002)]
        )
        assert report.mass_drift == pytest.approx(1e-3)

    def test_material_mass_drift(self):
        report = RunReport(
            case_name="x",
            scheme=RemapKind.AD,
            history=[self._totals(2.0, (1.0, 1.0)), self._totals(2.0, (1.1, 0.9))],
        )
        assert report.material_mass_drift == pytest.approx((0.1, 0.1))

    def test_empty_history(self):
        report = RunReport(case_name="x", scheme=RemapKind.AD)
        assert report.mass_drift == 0.0
        assert report.material_mass_drift == ()


class TestRunConfig:
    """Tests for RunConfig defaults and validation."""

    def test_defaults(self):
        config = RunConfig()
        assert config.case == "mono_advect"
        assert config.scheme is RemapKind.DIRECT_CF
        assert config.recon == ReconConfig()
        assert config.viscosity == PseudoViscosityParams()

    def test_rejects_cfl_above_one(self):
        with pytest.raises(ValueError, match="cfl"):
            RunConfig(cfl=1.5)

    def test_rejects_negative_cadence(self):
        with pytest.raises(ValueError, match="output_every"):
            RunConfig(output_every=-1)


class TestErrors:
    """Tests for the exception hierarchy."""

    def test_hydro_error_is_value_error(self):
        assert issubclass(TangledCellError, ValueError)

    def test_message_names_location(self):
        err = TangledCellError("Tangled cell", cell=(3, 4), step=7)
        assert str(err) == "Tangled cell at step 7, cell (i=3, j=4)"

    def test_message_without_location(self):
        assert str(HydroError("plain")) == "plain"

    def test_config_error_names_line(self):
        err = ConfigError("unknown key 'foo'", line=3)
        assert str(err) == "line 3: unknown key 'foo'"
        assert err.line == 3

    def test_first_index_reports_i_j(self):
        mask = np.zeros((4, 5), dtype=bool)
        mask[2, 3] = True
        assert first_index(mask) == (3, 2)
        assert first_index(np.zeros((2, 2), dtype=bool)) is None
