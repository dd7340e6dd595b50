"""
Field dumps and convergence tables.

CSV dumps hold one row per cell with 17 significant digits so binary64
values survive a round trip. VTK dumps are legacy ASCII STRUCTURED_POINTS
files with one CELL_DATA scalar per field.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from .models import ConvergenceStudy, OutputFormat, State

FIELD_COLUMNS = ["i", "j", "x", "y", "rho", "e", "p", "k0", "k1", "ux_mean", "uy_mean"]
FLOAT_FORMAT = "%.17g"


def _node_mean(a: np.ndarray) -> np.ndarray:
    return np.asarray(0.25 * (a[:-1, :-1] + a[:-1, 1:] + a[1:, :-1] + a[1:, 1:]))


def field_table(state: State) -> pd.DataFrame:
    """Cell fields of ``state`` as a DataFrame, rows ordered with ``i`` fastest."""
    mesh = state.mesh
    ny, nx = mesh.shape
    jj, ii = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    xc, yc = mesh.cell_centers()
    if state.materials is None:
        k0, k1 = np.ones(mesh.shape), np.zeros(mesh.shape)
    else:
        k0, k1 = state.materials.k
    columns = {
        "i": ii,
        "j": jj,
        "x": xc,
        "y": yc,
        "rho": state.rho,
        "e": state.e,
        "p": state.p,
        "k0": k0,
        "k1": k1,
        "ux_mean": _node_mean(state.ux),
        "uy_mean": _node_mean(state.uy),
    }
    return pd.DataFrame({name: np.ravel(values) for name, values in columns.items()})


def _write_vtk(state: State, path: Path) -> None:
    mesh = state.mesh
    table = field_table(state)
    lines = [
        "# vtk DataFile Version 3.0",
        f"hydro-remap step={state.step} t={state.time:.17g}",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {mesh.nx + 1} {mesh.ny + 1} 1",
        f"ORIGIN {mesh.x0:.17g} {mesh.y0:.17g} 0",
        f"SPACING {mesh.dx:.17g} {mesh.dy:.17g} 1",
        f"CELL_DATA {mesh.nx * mesh.ny}",
    ]
    for name in FIELD_COLUMNS[4:]:
        lines.append(f"SCALARS {name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines.extend(FLOAT_FORMAT % v for v in table[name].to_numpy())
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def write_fields(state: State, path: str | Path, fmt: OutputFormat = OutputFormat.CSV) -> Path:
    """
    Dump the cell fields of ``state``.

    Raises:
        OSError: The file cannot be written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt is OutputFormat.VTK:
        _write_vtk(state, path)
    else:
        field_table(state).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_fields(path: str | Path) -> pd.DataFrame:
    """Read a CSV field dump back without losing digits."""
    return pd.read_csv(path, float_precision="round_trip")


def write_convergence_table(study: ConvergenceStudy, path: str | Path) -> Path:
    """
    Write a convergence table; ``.xlsx`` paths get a workbook with a
    second sheet holding the fitted slopes, anything else gets CSV.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == ".xlsx":
        slopes = pd.DataFrame({"scheme": list(study.slopes), "slope": list(study.slopes.values())})
        with pd.ExcelWriter(path, engine="openpyxl") as writer:
            study.table.to_excel(writer, sheet_name="errors", index=False)
            slopes.to_excel(writer, sheet_name="slopes", index=False)
    else:
        study.table.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path
