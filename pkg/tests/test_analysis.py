"""
Tests for the closed-form scheme comparisons.

Covers the first-order advection weights, the single moving node volumes
and corner masses, the discrete curls and the one-step vorticity ratios.
"""

import math

import numpy as np
import pytest

from hydro_remap.analysis import (
    BBC_STABILITY_BOUND,
    bbc_stability_bound,
    bbc_vs_glace_crossover,
    boxed_velocity,
    discrete_curl,
    diffusion_crossover_cfl,
    linadv_o1_update,
    one_step_curl_ratio,
    ratio_table,
    scheme_layout,
    single_node_corner_mass,
    single_node_lag_volume,
)
from hydro_remap.lagrange import prescribed_lagrange_step
from hydro_remap.mesh_state import initial_state
from hydro_remap.models import (
    CornerScheme,
    CurlLayout,
    EosModel,
    Mesh,
    ReconConfig,
    RemapKind,
    SchemeKind,
    VortexKind,
    VortexSpec,
)
from hydro_remap.remap import remap

POINT = VortexSpec(VortexKind.POINT, sigma0=2.0 * math.pi)
IDEAL = VortexSpec(VortexKind.IDEAL, omega0=2.0)


class TestLinearAdvection:
    """Tests for the first-order upwind stencil."""

    def setup_method(self):
        self.a = np.arange(9.0).reshape(3, 3)

    def test_zero_courant_is_identity(self):
        assert linadv_o1_update(self.a, 0.0, 0.0) == 4.0

    def test_full_courant_shifts(self):
        assert linadv_o1_update(self.a, 1.0, 0.0) == 3.0
        assert linadv_o1_update(self.a, 0.0, 1.0) == 1.0
        assert linadv_o1_update(self.a, 1.0, 1.0) == 0.0

    def test_composition_of_sweeps(self):
        """Same result as an x sweep followed by a y sweep."""
        ex, ey = 0.3, 0.6
        rows = [self.a[j, 1] * (1 - ex) + self.a[j, 0] * ex for j in (0, 1)]
        expected = rows[1] * (1 - ey) + rows[0] * ey
        assert linadv_o1_update(self.a, ex, ey) == pytest.approx(expected)

    def test_rejects_courant_above_one(self):
        with pytest.raises(ValueError, match="eps_x"):
            linadv_o1_update(self.a, 1.5, 0.0)


class TestSingleNodeVolume:
    """Lagrangian volume when one node moves by (eps, eps)."""

    def test_alternate_direction(self):
        assert single_node_lag_volume(RemapKind.AD, 0.2) == pytest.approx(1.21)
        assert single_node_lag_volume(RemapKind.AD, 0.2, truncated=True) == pytest.approx(1.21)

    def test_direct(self):
        assert single_node_lag_volume(RemapKind.DIRECT, 0.2) == pytest.approx(1.2)
        assert single_node_lag_volume(RemapKind.DIRECT, 0.2, truncated=True) == pytest.approx(1.2)

    def test_exact(self):
        assert single_node_lag_volume(None, 0.2) == pytest.approx(1.2)

    def test_corner_flux(self):
        eps = 0.2
        expected = 1.0 + eps / (1.0 + eps) + eps**2
        assert single_node_lag_volume(RemapKind.DIRECT_CF, eps) == pytest.approx(expected, rel=1e-12)

    def test_corner_flux_series(self):
        """Residual against 1 + eps + eps^3 shrinks like eps^4."""
        residuals = [
            abs(single_node_lag_volume(RemapKind.DIRECT_CF, eps) - (1.0 + eps + eps**3))
            for eps in (0.1, 0.05)
        ]
        assert residuals[0] / residuals[1] >= 8.0
        assert single_node_lag_volume(RemapKind.DIRECT_CF, 0.1, truncated=True) == pytest.approx(1.101)

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.1])
    def test_rejects_displacement_out_of_range(self, eps):
        with pytest.raises(ValueError, match="Displacement"):
            single_node_lag_volume(RemapKind.AD, eps)


class TestSingleNodeCornerMass:
    """Relative mass sent to the diagonal neighbour."""

    def test_direct_sends_nothing(self):
        assert single_node_corner_mass(RemapKind.DIRECT, 0.3) == 0.0

    def test_alternate_direction(self):
        """The remap gives the two-pass value, not the leading terms of its series."""
        assert single_node_corner_mass(RemapKind.AD, 0.2) == pytest.approx(0.1**2 / 1.1**2, rel=1e-10)
        assert single_node_corner_mass(RemapKind.AD, 0.2, truncated=True) == pytest.approx(0.008)

    @pytest.mark.parametrize("eps", [0.2, 0.1, 0.05])
    def test_alternate_direction_matches_engine(self, eps):
        """Extra mass reaching the diagonal cell when cell (1, 1) carries one more unit."""
        mesh = Mesh.uniform(5, 5, 5.0, 5.0)
        ux = np.zeros(mesh.node_shape)
        uy = np.zeros(mesh.node_shape)
        ux[2, 2] = uy[2, 2] = eps
        recon = ReconConfig(face_order=1, corner_scheme=CornerScheme.UPWIND)
        received = []
        for extra in (0.0, 1.0):
            rho = np.ones(mesh.shape)
            rho[1, 1] += extra
            state = initial_state(mesh, EosModel.perfect(1.4), rho, np.ones(mesh.shape), ux, uy)
            out = remap(RemapKind.AD, prescribed_lagrange_step(state, ux, uy, 1.0), recon)
            received.append(out.mass[2, 2])
        assert single_node_corner_mass(RemapKind.AD, eps) == pytest.approx(received[1] - received[0], rel=1e-9)

    def test_alternate_direction_series_residual(self):
        residuals = [
            abs(
                single_node_corner_mass(RemapKind.AD, eps)
                - single_node_corner_mass(RemapKind.AD, eps, truncated=True)
            )
            for eps in (0.1, 0.05)
        ]
        assert residuals[0] / residuals[1] >= 8.0

    def test_alternate_direction_right_node(self):
        """The right node widens the second pass face to (eps + eps')/2."""
        eps, eps_prime = 0.1, 0.1
        a, b = 0.5 * eps, 0.5 * (eps + eps_prime)
        expected = a * b / ((1.0 + a) * (1.0 + b))
        assert single_node_corner_mass(RemapKind.AD, eps, eps_prime) == pytest.approx(expected, rel=1e-10)
        with_right = single_node_corner_mass(RemapKind.AD, 0.01, 0.01)
        without = single_node_corner_mass(RemapKind.AD, 0.01, 0.0)
        assert with_right - without == pytest.approx(0.25 * 0.01**2, rel=0.05)

    def test_exact(self):
        assert single_node_corner_mass(None, 0.1) == pytest.approx(0.01 / 1.21)

    def test_corner_flux(self):
        eps = 0.2
        vol = 1.0 + eps / (1.0 + eps) + eps**2
        assert single_node_corner_mass(RemapKind.DIRECT_CF, eps) == pytest.approx(eps**2 / vol, rel=1e-12)

    @pytest.mark.parametrize(
        "kind,series",
        [
            (RemapKind.DIRECT_CF, lambda e: e**2 - e**3),
            (None, lambda e: e**2 - 2.0 * e**3),
        ],
        ids=["corner_flux", "exact"],
    )
    def test_series_residual(self, kind, series):
        residuals = [abs(single_node_corner_mass(kind, eps) - series(eps)) for eps in (0.1, 0.05)]
        assert residuals[0] / residuals[1] >= 8.0
        assert single_node_corner_mass(kind, 0.1, truncated=True) == pytest.approx(series(0.1))


class TestDiscreteCurl:
    """Discrete curls of analytic fields."""

    @pytest.mark.parametrize("layout", list(CurlLayout))
    def test_solid_rotation(self, layout):
        assert discrete_curl(layout, IDEAL.velocity, 1.0) == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "layout,expected", [(CurlLayout.NODE, 4.0), (CurlLayout.CELL, 4.0), (CurlLayout.FACE, 8.0)]
    )
    def test_point_vortex(self, layout, expected):
        assert discrete_curl(layout, POINT.velocity, 1.0) == pytest.approx(expected)

    @pytest.mark.parametrize("layout", list(CurlLayout))
    def test_translation_has_no_curl(self, layout):
        assert discrete_curl(layout, lambda x, y: (3.0, -1.0), 0.5) == pytest.approx(0.0, abs=1e-14)

    def test_rejects_non_positive_size(self):
        with pytest.raises(ValueError, match="positive"):
            discrete_curl(CurlLayout.NODE, IDEAL.velocity, 0.0)


class TestCurlRatios:
    """One-step vorticity ratios."""

    def test_layouts(self):
        assert scheme_layout(SchemeKind.MYR_O1) is CurlLayout.NODE
        assert scheme_layout(SchemeKind.GLACE) is CurlLayout.CELL
        assert scheme_layout(SchemeKind.BBC) is CurlLayout.FACE

    @pytest.mark.parametrize("scheme", [SchemeKind.MYR_O1, SchemeKind.MYR_O2])
    def test_staggered_schemes_keep_curl(self, scheme):
        assert one_step_curl_ratio(scheme, POINT, 0.3) == pytest.approx(1.0)

    def test_centred_scheme(self):
        ratio = one_step_curl_ratio(SchemeKind.GLACE, POINT, 0.01, 0.34)
        assert ratio == pytest.approx(1.0 - 4.0 / 3.0 * 0.34 - 14.0 / 25.0 * 0.01)

    def test_face_scheme(self):
        ratio = one_step_curl_ratio(SchemeKind.BBC, POINT, 0.25)
        assert ratio == pytest.approx(1.0 - 48.0 / 25.0 * 0.25)

    @pytest.mark.parametrize("scheme", list(SchemeKind))
    def test_ideal_vortex_is_preserved(self, scheme):
        assert one_step_curl_ratio(scheme, IDEAL, 0.2, 0.3) == pytest.approx(1.0)

    def test_rejects_negative_step(self):
        with pytest.raises(ValueError, match="non-negative"):
            boxed_velocity(SchemeKind.BBC, POINT, -0.1)


class TestCrossovers:
    """Stability bound and the centred/face crossover."""

    def test_stability_bound(self):
        assert bbc_stability_bound() == pytest.approx(25.0 / 48.0)
        assert one_step_curl_ratio(SchemeKind.BBC, POINT, BBC_STABILITY_BOUND) == pytest.approx(
            0.0, abs=1e-14
        )

    def test_crossover_constant(self):
        assert bbc_vs_glace_crossover(0.1) == pytest.approx(17.0 / 32.0)
        assert bbc_vs_glace_crossover(3.0) == pytest.approx(17.0 / 32.0)

    @pytest.mark.parametrize("a0dt", [0.01, 0.1, 0.4])
    def test_ratios_equal_at_crossover(self, a0dt):
        cfl = diffusion_crossover_cfl(a0dt)
        assert cfl == pytest.approx(51.0 / 50.0 * a0dt)
        glace = one_step_curl_ratio(SchemeKind.GLACE, POINT, a0dt, cfl)
        bbc = one_step_curl_ratio(SchemeKind.BBC, POINT, a0dt)
        assert glace == pytest.approx(bbc)

    def test_rejects_non_positive_step(self):
        with pytest.raises(ValueError, match="positive"):
            diffusion_crossover_cfl(0.0)


class TestRatioTable:
    """Tests for the tabulated ratios."""

    def test_values(self):
        table = ratio_table(0.01, 0.34).set_index("scheme")
        assert list(table.columns) == ["layout", "point", "ideal"]
        assert len(table) == 4
        assert table.loc["GLACE", "point"] == pytest.approx(0.54106667, abs=1e-8)
        assert table.loc["BBC", "point"] == pytest.approx(0.9808, abs=1e-14)
        assert table.loc["MYR_o1", "point"] == pytest.approx(1.0, abs=1e-14)
        assert table.loc["MYR_o2", "point"] == pytest.approx(1.0, abs=1e-14)
        assert np.allclose(table["ideal"], 1.0, atol=1e-14)

    def test_centred_scheme_diffuses_most(self):
        """At a CFL term of 0.34 the centred scheme loses more curl than BBC."""
        table = ratio_table(0.01, 0.34).set_index("scheme")
        assert table.loc["GLACE", "point"] < table.loc["BBC", "point"]
