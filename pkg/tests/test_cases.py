"""
Tests for the benchmark catalogue and the painting of initial data.
"""

import math

import numpy as np
import pytest

from hydro_remap.cases import (
    WATER,
    build_case,
    case_names,
    initial_case_state,
    region_coverage,
    region_shares,
    rotation_velocity,
)
from hydro_remap.errors import ConfigError
from hydro_remap.models import BoundaryKind, EosKind, Mesh, Region, RegionShape


class TestCatalogue:
    """Tests for case lookup and desk resolutions."""

    def test_names(self):
        assert case_names() == [
            "mono_advect",
            "multi_advect",
            "mono_rotation",
            "multi_rotation",
            "water_air_rotation",
            "haas",
            "impact",
        ]

    def test_unknown_case(self):
        with pytest.raises(ConfigError, match="Unknown case 'sedov'"):
            build_case("sedov")

    def test_divisor(self):
        case = build_case("haas", divisor=10)
        assert (case.mesh.nx, case.mesh.ny) == (100, 9)
        assert case.mesh.lx == pytest.approx(10.0)
        assert case.mesh.ly == pytest.approx(0.09)

    def test_resolution_override(self):
        case = build_case("mono_advect", divisor=4, resolution=(20, 30))
        assert (case.mesh.nx, case.mesh.ny) == (20, 30)

    def test_advect_data(self):
        case = build_case("mono_advect")
        inside, outside = case.regions[1], case.regions[0]
        assert (inside.rho, outside.rho) == (10.0, 0.1)
        assert (inside.ux, inside.uy) == (5.0, 5.0)
        assert case.end_time == pytest.approx(0.16)
        assert case.reverse_time == pytest.approx(0.08)
        assert case.mesh.periodic_x

    def test_haas_shock_state(self):
        case = build_case("haas")
        shocked = case.regions[1]
        assert shocked.ux == pytest.approx(124.824)
        assert case.eos[1].gamma == pytest.approx(1.66)
        assert case.mesh.left is BoundaryKind.WALL

    def test_impact_water(self):
        case = build_case("impact")
        assert case.eos[1] == WATER
        assert case.eos[1].kind is EosKind.STIFFENED
        assert case.eos[1].pi_const == pytest.approx(2.1e9)
        assert case.snapshot_times == (3.5e-3, 4.5e-3, 6e-3)
        assert case.regions[0].ux == -1000.0

    def test_rotation_cases_are_prescribed(self):
        for name in ("mono_rotation", "multi_rotation", "water_air_rotation"):
            assert build_case(name, divisor=10).prescribed_velocity


class TestCoverage:
    """Tests for region rasterisation."""

    def test_rect_partial_cells(self):
        mesh = Mesh.uniform(4, 4, 1.0, 1.0)
        cover = region_coverage(Region(RegionShape.RECT, (0.125, 0.0, 0.5, 0.25)), mesh)
        assert cover[0].tolist() == pytest.approx([0.5, 1.0, 0.0, 0.0])
        assert np.all(cover[1:] == 0.0)

    def test_half_plane(self):
        mesh = Mesh.uniform(4, 4, 1.0, 1.0)
        cover = region_coverage(Region(RegionShape.HALF_PLANE, (0.375,)), mesh)
        assert cover[2].tolist() == pytest.approx([1.0, 0.5, 0.0, 0.0])

    def test_circle_area(self):
        """Sub-sampled coverage integrates to the disc area."""
        mesh = Mesh.uniform(32, 32, 1.0, 1.0)
        cover = region_coverage(Region(RegionShape.CIRCLE, (0.5, 0.5, 0.3)), mesh)
        assert np.sum(cover) * mesh.cell_area == pytest.approx(math.pi * 0.09, rel=1e-3)

    def test_shares_sum_to_one(self):
        case = build_case("haas", divisor=20)
        shares = region_shares(case, case.mesh)
        assert shares.shape == (3, *case.mesh.shape)
        assert np.allclose(shares.sum(axis=0), 1.0)


class TestInitialState:
    """Tests for painted initial states."""

    def test_single_material_painting(self):
        state = initial_case_state(build_case("mono_advect", resolution=(10, 10)))
        assert state.materials is None
        assert state.rho[2, 2] == 10.0
        assert state.rho[8, 8] == 0.1
        assert np.allclose(state.p, 1.0)
        assert np.all(state.ux == 5.0)

    def test_two_material_fractions(self, multimat_state):
        mat = multimat_state.materials
        assert np.allclose(mat.k.sum(axis=0), 1.0)
        square = 0.2 * 0.2
        assert np.sum(mat.k[1]) * multimat_state.mesh.cell_area == pytest.approx(square)
        assert np.allclose(multimat_state.rho, 1.29)
        assert np.allclose(multimat_state.p, 1.0)

    def test_impact_pressure_equilibrium(self):
        state = initial_case_state(build_case("impact", divisor=20))
        assert np.allclose(state.p, 1e5, rtol=1e-6)
        water = state.materials.k[1] == 1.0
        assert np.allclose(state.rho[water], 1000.0)

    def test_rotation_velocity(self):
        case = build_case("mono_rotation", resolution=(10, 10))
        ux, uy = rotation_velocity(case, case.mesh)
        assert ux[5, 5] == pytest.approx(0.0, abs=1e-12)
        assert uy[5, 10] == pytest.approx(2.0 * math.pi * 0.5)
        state = initial_case_state(case)
        assert np.all(state.ux[:, 0] == 0.0)
        assert np.all(state.uy[0, :] == 0.0)
