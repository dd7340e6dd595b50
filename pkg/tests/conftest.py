"""
Shared pytest fixtures for the hydrodynamics tests.

Provides small meshes and states so unit tests stay fast and never touch
the full-resolution benchmark cases.
"""

import numpy as np
import pytest
from loguru import logger

from hydro_remap.cases import build_case, initial_case_state
from hydro_remap.mesh_state import initial_state
from hydro_remap.models import BoundaryKind, EosModel, Mesh

AIR = EosModel.perfect(1.4)

# =============================================================================
# Meshes
# =============================================================================


@pytest.fixture
def periodic_mesh():
    """8x8 periodic unit square."""
    return Mesh.uniform(8, 8, 1.0, 1.0)


@pytest.fixture
def wall_mesh():
    """8x6 box with reflective walls on every side."""
    return Mesh.uniform(8, 6, 0.8, 0.6, boundary=BoundaryKind.WALL)


# =============================================================================
# Single-material states
# =============================================================================


@pytest.fixture
def make_state():
    """
    Factory for single-material air states.

    Usage:
        def test_something(make_state, periodic_mesh):
            state = make_state(periodic_mesh, rho=2.0, ux=1.0)
    """

    def _make(mesh, rho=1.0, p=1e5, ux=0.0, uy=0.0):
        rho_field = np.broadcast_to(np.asarray(rho, dtype=float), mesh.shape).copy()
        p_field = np.broadcast_to(np.asarray(p, dtype=float), mesh.shape).copy()
        ux_field = np.broadcast_to(np.asarray(ux, dtype=float), mesh.node_shape).copy()
        uy_field = np.broadcast_to(np.asarray(uy, dtype=float), mesh.node_shape).copy()
        return initial_state(mesh, AIR, rho_field, p_field, ux_field, uy_field)

    return _make


@pytest.fixture
def blob_state(periodic_mesh, make_state):
    """Smooth density bump on a periodic mesh moving uniformly along (1, 0.5)."""
    xc, yc = periodic_mesh.cell_centers()
    rho = 1.0 + 0.5 * np.exp(-((xc - 0.5) ** 2 + (yc - 0.5) ** 2) / 0.02)
    return make_state(periodic_mesh, rho=rho, p=1.0, ux=1.0, uy=0.5)


# =============================================================================
# Two-material states
# =============================================================================


@pytest.fixture
def multimat_case():
    """Air-in-air square advection on a 16x16 mesh; the square edges cut cells."""
    return build_case("multi_advect", resolution=(16, 16))


@pytest.fixture
def multimat_state(multimat_case):
    """Initial state of ``multimat_case``."""
    return initial_case_state(multimat_case)


# =============================================================================
# Log capture
# =============================================================================


@pytest.fixture
def log_messages():
    """
    Collect loguru messages emitted by the package.

    Usage:
        def test_something(log_messages):
            ...
            assert any("Capped" in m for m in log_messages)
    """
    messages = []
    logger.enable("hydro_remap")
    handler_id = logger.add(lambda message: messages.append(message.record["message"]), level="DEBUG")
    yield messages
    logger.remove(handler_id)
    logger.disable("hydro_remap")
