"""
Staggered predictor-corrector Lagrangian phase.

Thermodynamic quantities live at cell centres, velocities at nodes. The
predictor advances the mesh by half a step and the corrector completes the
step with the half-step pressure; cell masses are frozen throughout. In
two-material runs every material compresses like the cell (volume fractions
are frozen) and shares the cell pseudo-viscosity.
"""

from __future__ import annotations

import numpy as np

from .models import (
    FloatArray,
    HalfStepState,
    LagrangianState,
    Mesh,
    PseudoViscosityParams,
    State,
)
from .mesh_state import (
    apply_wall_velocity,
    cell_volumes,
    eos_pressure,
    mixture_sound_speed,
    nodal_masses,
    pad_cells,
    sync_periodic_nodes,
)


def pseudo_viscosity(
    rho: FloatArray | float,
    c_sound: FloatArray | float,
    div_u: FloatArray | float,
    params: PseudoViscosityParams,
    length: float = 1.0,
) -> FloatArray:
    """
    Compression-only artificial viscosity.

    ``Q = rho a1 L c |div u| + a2 L^2 rho (div u)^2`` where ``div u < 0``,
    zero elsewhere.
    """
    rho = np.asarray(rho, dtype=float)
    div = np.asarray(div_u, dtype=float)
    q = rho * params.a1 * length * np.asarray(c_sound) * np.abs(div) + params.a2 * length**2 * rho * div**2
    return np.asarray(np.where(div < 0.0, q, 0.0))


def div_u_cell(ux: FloatArray, uy: FloatArray, mesh: Mesh) -> FloatArray:
    """Cell divergence from node-pair face means: ``(u_r - u_l)/dx + (v_t - v_b)/dy``."""
    du = (ux[:-1, 1:] + ux[1:, 1:] - ux[:-1, :-1] - ux[1:, :-1]) / (2.0 * mesh.dx)
    dv = (uy[1:, :-1] + uy[1:, 1:] - uy[:-1, :-1] - uy[:-1, 1:]) / (2.0 * mesh.dy)
    return np.asarray(du + dv)


def grad_pq_node(p_half: FloatArray, q: FloatArray, mesh: Mesh) -> tuple[FloatArray, FloatArray]:
    """Gradient of ``P + Q`` at every node from the four surrounding cells."""
    pq = pad_cells(p_half + q, mesh, 1)
    ny, nx = mesh.shape
    ll = pq[0 : ny + 1, 0 : nx + 1]
    lr = pq[0 : ny + 1, 1 : nx + 2]
    ul = pq[1 : ny + 2, 0 : nx + 1]
    ur = pq[1 : ny + 2, 1 : nx + 2]
    gx = ((ur + lr) - (ul + ll)) / (2.0 * mesh.dx)
    gy = ((ul + ur) - (ll + lr)) / (2.0 * mesh.dy)
    return np.asarray(gx), np.asarray(gy)


def _moved_nodes(mesh: Mesh, ux: FloatArray, uy: FloatArray, tau: float) -> tuple[FloatArray, FloatArray]:
    xn, yn = mesh.node_coords()
    return xn + tau * ux, yn + tau * uy


def _material_update(
    state: State, vol_new: FloatArray, p_drive: FloatArray, q: FloatArray, e_start: FloatArray
) -> tuple[FloatArray, FloatArray]:
    """
    Partial energies and pressures after an iso-deformation volume change.

    ``p_drive`` holds the partial pressures doing the work; absent materials
    keep their energy and get zero pressure.
    """
    assert state.materials is not None
    mat = state.materials
    e_new = e_start.copy()
    p_new = np.zeros_like(e_start)
    for alpha, eos in enumerate(mat.eos):
        present = mat.k[alpha] > 0.0
        if not np.any(present):
            continue
        k = mat.k[alpha][present]
        m = mat.mass[alpha][present]
        # 1/rho_new - 1/rho_old at frozen fraction and mass
        dspec = k * (vol_new[present] - state.vol[present]) / m
        e_new[alpha][present] = e_start[alpha][present] - (p_drive[alpha][present] + q[present]) * dspec
        p_new[alpha][present] = eos_pressure(eos, m / (k * vol_new[present]), e_new[alpha][present])
    return e_new, p_new


def predict(
    state: State, dt: float, params: PseudoViscosityParams | None = None
) -> HalfStepState:
    """
    Half-step prediction.

    Raises:
        TangledCellError: A half-step cell has a non-positive area
        UnphysicalStateError: Negative sound-speed radicand
    """
    params = params or PseudoViscosityParams()
    mesh = state.mesh
    c = mixture_sound_speed(state)
    q = pseudo_viscosity(state.rho, c, div_u_cell(state.ux, state.uy, mesh), params, mesh.char_length)

    xh, yh = _moved_nodes(mesh, state.ux, state.uy, 0.5 * dt)
    vol_half = cell_volumes(xh, yh, step=state.step + 1)
    rho_half = state.mass / vol_half

    mat_e: FloatArray | None = None
    mat_p: FloatArray | None = None
    if state.materials is None:
        e_half = state.e - (state.p + q) * (1.0 / rho_half - state.vol / state.mass)
        p_half = eos_pressure(state.eos, rho_half, e_half)
    else:
        mat = state.materials
        mat_e, mat_p = _material_update(state, vol_half, mat.p, q, mat.e)
        p_half = np.sum(mat.k * mat_p, axis=0)
        e_half = np.sum(mat.mass * mat_e, axis=0) / state.mass

    gx, gy = grad_pq_node(p_half, q, mesh)
    rho_p = nodal_masses(state.mass, mesh) / mesh.cell_area
    ux_half = state.ux - 0.5 * dt * gx / rho_p
    uy_half = state.uy - 0.5 * dt * gy / rho_p
    apply_wall_velocity(ux_half, uy_half, mesh)
    sync_periodic_nodes(ux_half, mesh)
    sync_periodic_nodes(uy_half, mesh)

    return HalfStepState(
        xn=xh,
        yn=yh,
        ux=ux_half,
        uy=uy_half,
        vol=vol_half,
        rho=rho_half,
        e=e_half,
        p=p_half,
        q=q,
        mat_e=mat_e,
        mat_p=mat_p,
    )


def correct(state: State, half: HalfStepState, dt: float) -> LagrangianState:
    """
    Complete the step with the half-step velocity and pressure.

    Raises:
        TangledCellError: An end-of-step cell has a non-positive area
    """
    mesh = state.mesh
    step = state.step + 1
    xl, yl = _moved_nodes(mesh, half.ux, half.uy, dt)
    vol_lag = cell_volumes(xl, yl, step=step)
    rho_lag = state.mass / vol_lag

    materials = None
    if state.materials is None:
        e_lag = state.e - (half.p + half.q) * (1.0 / rho_lag - state.vol / state.mass)
        p_lag = eos_pressure(state.eos, rho_lag, e_lag)
    else:
        assert half.mat_p is not None
        materials = state.materials.copy()
        mat_e, mat_p = _material_update(state, vol_lag, half.mat_p, half.q, state.materials.e)
        materials.e = mat_e
        materials.p = mat_p
        p_lag = np.sum(materials.k * mat_p, axis=0)
        e_lag = np.sum(materials.mass * mat_e, axis=0) / state.mass

    ux_lag = 2.0 * half.ux - state.ux
    uy_lag = 2.0 * half.uy - state.uy
    apply_wall_velocity(ux_lag, uy_lag, mesh)

    return LagrangianState(
        mesh=mesh,
        dt=dt,
        step=step,
        xn=xl,
        yn=yl,
        ux=ux_lag,
        uy=uy_lag,
        ux_half=half.ux,
        uy_half=half.uy,
        vol=vol_lag,
        rho=rho_lag,
        e=np.asarray(e_lag),
        p=np.asarray(p_lag),
        mass=state.mass.copy(),
        q=half.q,
        eos=state.eos,
        materials=materials,
    )


def predict_correct_multimat(
    state: State, dt: float, params: PseudoViscosityParams | None = None
) -> LagrangianState:
    """Two-material Lagrangian phase; volume fractions and partial masses are frozen."""
    if state.materials is None:
        raise ValueError("predict_correct_multimat needs a two-material state")
    return correct(state, predict(state, dt, params), dt)


def lagrange_step(
    state: State, dt: float, params: PseudoViscosityParams | None = None
) -> LagrangianState:
    """Full Lagrangian phase of one step, single- or two-material."""
    if state.materials is not None:
        return predict_correct_multimat(state, dt, params)
    return correct(state, predict(state, dt, params), dt)


def prescribed_lagrange_step(
    state: State, ux: FloatArray, uy: FloatArray, dt: float
) -> LagrangianState:
    """
    Move the mesh with an imposed node velocity.

    Used by the rotation cases: thermodynamics and velocities are frozen,
    only the geometry (and thus the remapped fields) changes.
    """
    mesh = state.mesh
    ux = ux.copy()
    uy = uy.copy()
    apply_wall_velocity(ux, uy, mesh)
    sync_periodic_nodes(ux, mesh)
    sync_periodic_nodes(uy, mesh)
    xl, yl = _moved_nodes(mesh, ux, uy, dt)
    step = state.step + 1
    vol_lag = cell_volumes(xl, yl, step=step)
    return LagrangianState(
        mesh=mesh,
        dt=dt,
        step=step,
        xn=xl,
        yn=yl,
        ux=ux,
        uy=uy,
        ux_half=ux,
        uy_half=uy,
        vol=vol_lag,
        rho=state.mass / vol_lag,
        e=state.e.copy(),
        p=state.p.copy(),
        mass=state.mass.copy(),
        q=np.zeros(mesh.shape),
        eos=state.eos,
        materials=None if state.materials is None else state.materials.copy(),
    )
