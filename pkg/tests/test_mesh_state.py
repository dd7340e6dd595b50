"""
Unit tests for grid geometry, equations of state and nodal quantities.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydro_remap.errors import TangledCellError, UnphysicalStateError
from hydro_remap.geometry import shoelace_area
from hydro_remap.mesh_state import (
    GHOST,
    cell_volume,
    cell_volumes,
    conserved_totals,
    eos_pressure,
    nodal_masses,
    pad_cells,
    pad_nodes,
    sound_speed,
    sync_periodic_nodes,
)
from hydro_remap.models import EosModel, Mesh

AIR = EosModel.perfect(1.4)
WATER = EosModel.stiffened(7.0, 2.1e9)


class TestCellVolume:
    """Tests for the two-triangle cell area."""

    def test_unit_square(self):
        assert cell_volume((0, 0), (1, 0), (1, 1), (0, 1)) == pytest.approx(1.0)

    def test_sheared_square_matches_shoelace(self):
        """Moving the upper-right node gives the polygon area."""
        quad = [(0.0, 0.0), (1.0, 0.0), (1.2, 1.2), (0.0, 1.0)]
        area = cell_volume(quad[0], quad[1], quad[2], quad[3])
        assert area == pytest.approx(shoelace_area(quad), abs=1e-14)

    @settings(max_examples=1000, deadline=None)
    @given(
        jitter=st.lists(
            st.floats(min_value=-0.2, max_value=0.2, allow_nan=False), min_size=8, max_size=8
        ),
        size=st.floats(min_value=0.5, max_value=2.0),
        dx=st.floats(min_value=-10.0, max_value=10.0),
        dy=st.floats(min_value=-10.0, max_value=10.0),
    )
    def test_random_convex_quads(self, jitter, size, dx, dy):
        """Jittered squares stay convex; the area ignores translation and matches the shoelace."""
        corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        quad = [
            (size * (x + jitter[2 * n]), size * (y + jitter[2 * n + 1]))
            for n, (x, y) in enumerate(corners)
        ]
        moved = [(x + dx, y + dy) for x, y in quad]
        area = cell_volume(*quad)
        assert area == pytest.approx(shoelace_area(quad), rel=0.0, abs=1e-13)
        assert cell_volume(*moved) == pytest.approx(area, rel=0.0, abs=1e-13)

    def test_crossed_edges_are_tangled(self):
        """Node (1, 1) pulled to (0.1, 0.1) folds the cell."""
        with pytest.raises(TangledCellError) as exc:
            cell_volume((0, 0), (1, 0), (0.1, 0.1), (0, 1), cell=(2, 3), step=5)
        assert exc.value.cell == (2, 3)
        assert "step 5" in str(exc.value)

    def test_vectorised_matches_scalar(self):
        """Node-array areas agree with the scalar formula."""
        mesh = Mesh.uniform(4, 4, 1.0, 1.0)
        xn, yn = mesh.node_coords()
        xn = xn.copy()
        yn = yn.copy()
        xn[2, 2] += 0.05
        yn[2, 2] += 0.03
        areas = cell_volumes(xn, yn)
        expected = cell_volume(
            (xn[1, 1], yn[1, 1]), (xn[1, 2], yn[1, 2]), (xn[2, 2], yn[2, 2]), (xn[2, 1], yn[2, 1])
        )
        assert areas[1, 1] == pytest.approx(expected)
        assert np.sum(areas) == pytest.approx(1.0)

    def test_vectorised_reports_tangled_cell(self):
        mesh = Mesh.uniform(4, 4, 1.0, 1.0)
        xn, yn = mesh.node_coords()
        xn = xn.copy()
        xn[1, 2] -= 0.6
        with pytest.raises(TangledCellError):
            cell_volumes(xn, yn, step=1)


class TestEquationsOfState:
    """Tests for eos_pressure and sound_speed."""

    def test_perfect_gas_pressure(self):
        assert float(eos_pressure(AIR, 1.0, 2.5e5)) == pytest.approx(1e5)

    def test_stiffened_pressure(self):
        e = (1e5 + 2.1e9) / 6000.0
        assert float(eos_pressure(WATER, 1000.0, e)) == pytest.approx(1e5, rel=1e-9)

    def test_zero_energy(self):
        assert float(eos_pressure(AIR, 3.0, 0.0)) == 0.0

    def test_air_sound_speed(self):
        assert float(sound_speed(AIR, 1.0, 1e5)) == pytest.approx(math.sqrt(1.4e5))

    def test_zero_pressure_sound_speed(self):
        assert float(sound_speed(AIR, 1.0, 0.0)) == 0.0

    def test_water_sound_speed(self):
        expected = math.sqrt(7.0 * (2.1e9 + 1e5) / 1000.0)
        assert float(sound_speed(WATER, 1000.0, 1e5)) == pytest.approx(expected)

    def test_negative_radicand(self):
        with pytest.raises(UnphysicalStateError, match="radicand"):
            sound_speed(AIR, 1.0, -1.0)

    def test_negative_radicand_locates_cell(self):
        p = np.ones((3, 4))
        p[2, 1] = -5.0
        with pytest.raises(UnphysicalStateError) as exc:
            sound_speed(AIR, np.ones((3, 4)), p)
        assert exc.value.cell == (1, 2)


class TestNodalMasses:
    """Tests for the quarter-sum node masses."""

    def test_uniform_field(self, periodic_mesh):
        m_p = nodal_masses(np.full(periodic_mesh.shape, 4.0), periodic_mesh)
        assert m_p.shape == periodic_mesh.node_shape
        assert np.allclose(m_p, 4.0)

    def test_single_heavy_cell(self, periodic_mesh):
        """One cell of mass 8 gives 2 to each of its nodes."""
        mass = np.zeros(periodic_mesh.shape)
        mass[3, 4] = 8.0
        m_p = nodal_masses(mass, periodic_mesh)
        for node in ((3, 4), (3, 5), (4, 4), (4, 5)):
            assert m_p[node] == pytest.approx(2.0)

    def test_periodic_sum(self, periodic_mesh):
        """Unique node masses sum to the cell masses."""
        rng = np.random.default_rng(3)
        mass = rng.uniform(0.5, 2.0, periodic_mesh.shape)
        m_p = nodal_masses(mass, periodic_mesh)
        assert np.sum(m_p[:-1, :-1]) == pytest.approx(np.sum(mass))

    def test_wall_mirror(self, wall_mesh):
        """A wall node sees the two adjacent cells twice through the mirror."""
        mass = np.arange(wall_mesh.nx * wall_mesh.ny, dtype=float).reshape(wall_mesh.shape)
        m_p = nodal_masses(mass, wall_mesh)
        assert m_p[0, 3] == pytest.approx(0.5 * (mass[0, 2] + mass[0, 3]))
        assert m_p[0, 0] == pytest.approx(mass[0, 0])


class TestPadding:
    """Tests for the ghost layers."""

    def test_periodic_cells_wrap(self, periodic_mesh):
        a = np.arange(64, dtype=float).reshape(8, 8)
        p = pad_cells(a, periodic_mesh)
        assert p.shape == (8 + 2 * GHOST, 8 + 2 * GHOST)
        assert p[GHOST, 0] == a[0, -2]
        assert p[GHOST, -1] == a[0, 1]

    def test_wall_cells_mirror_and_negate(self, wall_mesh):
        a = np.arange(48, dtype=float).reshape(6, 8) + 1.0
        p = pad_cells(a, wall_mesh, negate_x=True)
        assert p[GHOST, GHOST - 1] == -a[0, 0]
        assert p[GHOST - 1, GHOST] == a[0, 0]

    def test_periodic_nodes_skip_duplicate(self, periodic_mesh):
        """Ghost node left of node 0 is node nx - 1, not the duplicate node nx."""
        a = np.tile(np.arange(9, dtype=float), (9, 1))
        p = pad_nodes(a, periodic_mesh)
        assert p[GHOST, GHOST - 1] == 7.0
        assert p[GHOST, GHOST + 8] == 0.0

    def test_sync_periodic_nodes(self, periodic_mesh):
        a = np.zeros(periodic_mesh.node_shape)
        a[:, 0] = 3.0
        sync_periodic_nodes(a, periodic_mesh)
        assert np.all(a[:-1, -1] == 3.0)


class TestConservedTotals:
    """Tests for the ledger totals."""

    def test_uniform_flow(self, make_state, periodic_mesh):
        state = make_state(periodic_mesh, rho=2.0, p=1e5, ux=3.0, uy=-1.0)
        totals = conserved_totals(state)
        assert totals.mass == pytest.approx(2.0)
        assert totals.momentum_x == pytest.approx(6.0)
        assert totals.momentum_y == pytest.approx(-2.0)
        assert totals.kinetic_energy == pytest.approx(0.5 * 2.0 * 10.0)
        assert totals.internal_energy == pytest.approx(2.5e5)
        assert totals.material_mass == ()
