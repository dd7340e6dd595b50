"""
Time loop of the Lagrange-remap engine.

Each step picks a CFL time step, runs the Lagrangian phase (or moves the mesh
with the imposed rotation), remaps back to the Eulerian grid and scans the
result. A conservation ledger line is logged after every step.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable, Sequence
from dataclasses import replace

import numpy as np
import pandas as pd
from loguru import logger

from .cases import build_case, initial_case_state, rotation_velocity
from .errors import CflViolationError, ConfigError, UnphysicalStateError, first_index
from .lagrange import lagrange_step, prescribed_lagrange_step
from .mesh_state import conserved_totals, mixture_sound_speed
from .models import (
    CaseSpec,
    ConvergenceStudy,
    EosKind,
    FloatArray,
    LagrangianState,
    Mesh,
    PseudoViscosityParams,
    ReconConfig,
    RemapDiagnostics,
    RemapKind,
    RunReport,
    State,
    StepTotals,
)
from .remap import remap

StepHook = Callable[[State], None]

# Relative slack when clipping a step onto an event time
EVENT_TOL = 1e-12


def _node_speed_per_cell(ux: FloatArray, uy: FloatArray) -> FloatArray:
    speed = np.hypot(ux, uy)
    return np.asarray(np.maximum.reduce([speed[:-1, :-1], speed[:-1, 1:], speed[1:, :-1], speed[1:, 1:]]))


def cfl_dt(state: State, cfl: float) -> float:
    """
    CFL time step ``cfl min(dx, dy) / max(c + |u|)``.

    ``|u|`` is the largest node speed around each cell.

    Raises:
        CflViolationError: The wave speed is not finite or vanishes everywhere
    """
    mesh = state.mesh
    speed = mixture_sound_speed(state) + _node_speed_per_cell(state.ux, state.uy)
    bad = ~np.isfinite(speed)
    if np.any(bad):
        raise CflViolationError("Non-finite wave speed", cell=first_index(bad), step=state.step)
    top = float(np.max(speed))
    if top <= 0.0:
        raise CflViolationError("No signal speed to bound the time step", step=state.step)
    return cfl * min(mesh.dx, mesh.dy) / top


def l2_error(field: FloatArray, reference: FloatArray, mesh: Mesh) -> float:
    """
    ``sqrt(sum (a - b)^2 dx dy)``.

    Raises:
        ConfigError: The fields do not live on ``mesh``
    """
    if np.shape(field) != mesh.shape or np.shape(reference) != mesh.shape:
        raise ConfigError(
            f"Field shapes {np.shape(field)} and {np.shape(reference)} do not match mesh {mesh.shape}"
        )
    diff = np.asarray(field, dtype=float) - np.asarray(reference, dtype=float)
    return math.sqrt(float(np.sum(diff**2)) * mesh.cell_area)


def check_state(state: State) -> None:
    """
    Scan a remapped state.

    Raises:
        UnphysicalStateError: NaN/Inf in a field or a non-positive perfect-gas pressure
    """
    for name, values in (("rho", state.rho), ("e", state.e), ("p", state.p), ("ux", state.ux), ("uy", state.uy)):
        bad = ~np.isfinite(values)
        if np.any(bad):
            raise UnphysicalStateError(f"Non-finite {name}", cell=first_index(bad), step=state.step)
    if state.materials is None:
        if state.eos.kind is EosKind.PERFECT and np.any(state.p <= 0.0):
            raise UnphysicalStateError(
                f"Non-positive gas pressure {float(np.min(state.p)):.6g}",
                cell=first_index(state.p <= 0.0),
                step=state.step,
            )
        return
    mat = state.materials
    for alpha, eos in enumerate(mat.eos):
        present = mat.k[alpha] > 0.0
        if eos.kind is EosKind.PERFECT:
            bad = present & (mat.p[alpha] <= 0.0)
            if np.any(bad):
                raise UnphysicalStateError(
                    f"Non-positive pressure {float(np.min(mat.p[alpha][bad])):.6g} in gas material {alpha}",
                    cell=first_index(bad),
                    step=state.step,
                )
        else:
            pure = mat.k[alpha] == 1.0
            negative = pure & (mat.p[alpha] < 0.0)
            if np.any(negative):
                logger.warning(
                    f"{int(np.sum(negative))} pure cell(s) of material {alpha} under tension "
                    f"at step {state.step}, min p={float(np.min(mat.p[alpha][negative])):.6g}"
                )


def ledger_line(totals: StepTotals) -> str:
    """Conservation ledger entry of one step."""
    line = (
        f"step={totals.step} t={totals.time:.17g} dt={totals.dt:.17g} mass={totals.mass:.17g} "
        f"momentum=({totals.momentum_x:.17g},{totals.momentum_y:.17g}) "
        f"energy={totals.internal_energy + totals.kinetic_energy:.17g}"
    )
    if totals.material_mass:
        line += " " + " ".join(f"mass{a}={m:.17g}" for a, m in enumerate(totals.material_mass))
    return line


class HydroEngine:
    """
    Runs one case with one remap engine.

    Events (velocity reversal, snapshots, end time) are hit exactly by
    shortening the step that would cross them.
    """

    def __init__(
        self,
        case: CaseSpec,
        *,
        scheme: RemapKind | None = None,
        recon: ReconConfig | None = None,
        viscosity: PseudoViscosityParams | None = None,
        cfl: float | None = None,
    ) -> None:
        self.case = case
        self.scheme = scheme or case.scheme
        self.recon = recon or case.recon
        self.viscosity = viscosity or case.viscosity
        self.cfl = cfl or case.cfl
        self.state = initial_case_state(case)
        self.initial = self.state.copy()
        self.diagnostics = RemapDiagnostics()
        self.history: list[StepTotals] = [conserved_totals(self.state)]
        self.snapshots: dict[float, State] = {}
        self._reversed = False

    def reset(self) -> None:
        """Reset the engine to the initial state of the case."""
        self.state = self.initial.copy()
        self.diagnostics = RemapDiagnostics()
        self.history = [conserved_totals(self.state)]
        self.snapshots = {}
        self._reversed = False

    def _next_event(self, t: float) -> float:
        events = [self.case.end_time, *self.case.snapshot_times]
        if self.case.reverse_time is not None and not self._reversed:
            events.append(self.case.reverse_time)
        return min(e for e in events if e > t * (1.0 + EVENT_TOL))

    def _time_step(self) -> tuple[float, float]:
        """Time step and the time it lands on."""
        t = self.state.time
        dt = cfl_dt(self.state, self.cfl)
        target = self._next_event(t)
        if t + dt >= target * (1.0 - EVENT_TOL):
            return target - t, target
        return dt, t + dt

    def _lagrange(self, dt: float) -> LagrangianState:
        if self.case.prescribed_velocity:
            return prescribed_lagrange_step(self.state, self.state.ux, self.state.uy, dt)
        return lagrange_step(self.state, dt, self.viscosity)

    def step(self) -> State:
        """
        Advance one time step.

        Raises:
            HydroError: Any failure, located by step and cell
        """
        if self.case.prescribed_velocity:
            self.state.ux, self.state.uy = rotation_velocity(self.case, self.state.mesh)
        dt, t_new = self._time_step()
        lag = self._lagrange(dt)
        new = remap(self.scheme, lag, self.recon, self.diagnostics)
        new.time = t_new
        check_state(new)
        self.state = new

        if (
            self.case.reverse_time is not None
            and not self._reversed
            and math.isclose(t_new, self.case.reverse_time, rel_tol=EVENT_TOL)
        ):
            self.state.ux = -self.state.ux
            self.state.uy = -self.state.uy
            self._reversed = True
            logger.info(f"Velocities reversed at t={t_new:.6g}")
        for when in self.case.snapshot_times:
            if math.isclose(t_new, when, rel_tol=EVENT_TOL):
                self.snapshots[when] = self.state.copy()

        totals = conserved_totals(self.state, dt)
        self.history.append(totals)
        logger.info(ledger_line(totals))
        logger.debug(
            f"step={totals.step} rho=[{totals.rho_min:.6g}, {totals.rho_max:.6g}] "
            f"p=[{totals.p_min:.6g}, {totals.p_max:.6g}]"
        )
        return self.state

    def run(self, hooks: Sequence[StepHook] = (), max_steps: int | None = None) -> RunReport:
        """
        Step until the end time (or ``max_steps``) and report.

        ``hooks`` are called with the state after every step.
        """
        self.reset()
        start = time.perf_counter()
        logger.info(
            f"Running {self.case.name} on {self.case.mesh.nx}x{self.case.mesh.ny} "
            f"with {self.scheme.value}, T={self.case.end_time:.6g}"
        )
        steps = 0
        while self.state.time < self.case.end_time * (1.0 - EVENT_TOL):
            if max_steps is not None and steps >= max_steps:
                break
            self.step()
            steps += 1
            for hook in hooks:
                hook(self.state)
        return self._report(steps, time.perf_counter() - start)

    def _report(self, steps: int, wall_time: float) -> RunReport:
        final = self.state
        mesh = final.mesh
        l2_k = None
        if final.materials is not None and self.initial.materials is not None:
            l2_k = l2_error(final.materials.k[1], self.initial.materials.k[1], mesh)
        return RunReport(
            case_name=self.case.name,
            scheme=self.scheme,
            history=list(self.history),
            initial_state=self.initial,
            final_state=final,
            snapshots=dict(self.snapshots),
            l2_rho=l2_error(final.rho, self.initial.rho, mesh),
            l2_k=l2_k,
            wall_time=wall_time,
            steps=steps,
            max_fraction_violation=self.diagnostics.max_fraction_violation,
        )

    def print_ledger(self, every: int = 1) -> None:
        """Print the conservation ledger in a readable format."""
        print("\n" + "=" * 110)
        print(f"CONSERVATION LEDGER: {self.case.name} ({self.scheme.value})")
        print("=" * 110)
        print(
            f"{'Step':>6} {'Time':>13} {'dt':>11} {'Mass':>19} "
            f"{'Momentum x':>14} {'Momentum y':>14} {'Energy':>16}"
        )
        print("-" * 110)
        for totals in self.history[::every]:
            print(
                f"{totals.step:>6} {totals.time:>13.6e} {totals.dt:>11.4e} {totals.mass:>19.12e} "
                f"{totals.momentum_x:>14.6e} {totals.momentum_y:>14.6e} "
                f"{totals.internal_energy + totals.kinetic_energy:>16.8e}"
            )
        print("=" * 110)

    def print_summary(self, report: RunReport) -> None:
        """Print the outcome of a run."""
        last = report.history[-1]
        print("\n" + "=" * 70)
        print("RUN SUMMARY")
        print("=" * 70)
        print(f"  Case:              {report.case_name}")
        print(f"  Remap:             {report.scheme.value}")
        print(f"  Steps:             {report.steps}")
        print(f"  Final time:        {last.time:.6e} s")
        print(f"  Wall time:         {report.wall_time:.2f} s")
        print(f"  Mass drift:        {report.mass_drift:.3e}")
        for alpha, drift in enumerate(report.material_mass_drift):
            print(f"  Material {alpha} drift:  {drift:.3e}")
        print(f"  rho range:         [{last.rho_min:.6g}, {last.rho_max:.6g}]")
        print(f"  p range:           [{last.p_min:.6g}, {last.p_max:.6g}]")
        if report.l2_rho is not None:
            print(f"  L2(rho - rho0):    {report.l2_rho:.6e}")
        if report.l2_k is not None:
            print(f"  L2(k1 - k1_0):     {report.l2_k:.6e}")
            print(f"  Max k violation:   {report.max_fraction_violation:.3e}")
        print("=" * 70)


# =============================================================================
# Convergence studies
# =============================================================================


def fit_slope(dx: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``log(error)`` against ``log(dx)``; NaN when an error is zero."""
    err = np.asarray(errors, dtype=float)
    if len(err) < 2 or np.any(err <= 0.0):
        return math.nan
    return float(np.polyfit(np.log(np.asarray(dx, dtype=float)), np.log(err), 1)[0])


def convergence_study(
    case_name: str,
    resolutions: Sequence[int],
    schemes: Sequence[RemapKind],
    *,
    recon: ReconConfig | None = None,
    end_time: float | None = None,
    case: CaseSpec | None = None,
) -> ConvergenceStudy:
    """
    Run ``case_name`` on every resolution with every scheme.

    Resolutions give the cell count along x; the y count keeps the aspect
    ratio of the case mesh. The error is the L2 distance to the initial
    field, so the case must bring its data back (advect-and-return or a full
    rotation). ``case`` replaces the named case when given.
    """
    base = case or build_case(case_name)
    if end_time is not None:
        base = replace(base, end_time=end_time)
    rows = []
    for scheme in schemes:
        for n in resolutions:
            ny = max(3, round(n * base.mesh.ny / base.mesh.nx))
            mesh_case = replace(base, mesh=base.mesh.resized(n, ny))
            report = HydroEngine(mesh_case, scheme=scheme, recon=recon).run()
            rows.append(
                {
                    "scheme": scheme.value,
                    "nx": n,
                    "ny": ny,
                    "dx": mesh_case.mesh.dx,
                    "l2_rho": report.l2_rho,
                    "l2_k": report.l2_k,
                    "steps": report.steps,
                    "mass_drift": report.mass_drift,
                }
            )
            logger.info(
                f"{base.name} {scheme.value} {n}x{ny}: l2_rho={report.l2_rho:.6e} steps={report.steps}"
            )
    table = pd.DataFrame(rows)
    slopes = {
        scheme.value: fit_slope(
            table.loc[table["scheme"] == scheme.value, "dx"].tolist(),
            table.loc[table["scheme"] == scheme.value, "l2_rho"].tolist(),
        )
        for scheme in schemes
    }
    return ConvergenceStudy(case_name=base.name, table=table, slopes=slopes)
