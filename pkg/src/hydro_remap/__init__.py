"""
2D multi-material Lagrange-remap hydrodynamics.

A staggered predictor-corrector Lagrangian phase followed by a conservative
remap back to the Eulerian grid, by alternate directions (AD), by one direct
pass through the faces (Direct) or through faces and corners (DirectCF).
Two-material cells carry a PLIC interface.
"""

from loguru import logger

from .analysis import (
    bbc_stability_bound,
    bbc_vs_glace_crossover,
    discrete_curl,
    linadv_o1_update,
    one_step_curl_ratio,
    ratio_table,
    single_node_corner_mass,
    single_node_lag_volume,
)
from .cases import build_case, case_names, initial_case_state
from .config import load_config, parse_config
from .errors import (
    CflViolationError,
    ConfigError,
    HydroError,
    IsolatedMixedCellError,
    NegativeMassError,
    TangledCellError,
    UnphysicalStateError,
    UsageError,
    VolumeFractionError,
)
from .harness import HydroEngine, cfl_dt, convergence_study, l2_error
from .models import (
    CaseSpec,
    CornerScheme,
    EosModel,
    Mesh,
    ReconConfig,
    RemapKind,
    RunConfig,
    RunReport,
    SchemeKind,
    State,
    VortexKind,
    VortexSpec,
)
from .output import write_convergence_table, write_fields
from .remap import remap

__version__ = "0.1.0"

logger.disable("hydro_remap")

__all__ = [
    "CaseSpec",
    "CflViolationError",
    "ConfigError",
    "CornerScheme",
    "EosModel",
    "HydroEngine",
    "HydroError",
    "IsolatedMixedCellError",
    "Mesh",
    "NegativeMassError",
    "ReconConfig",
    "RemapKind",
    "RunConfig",
    "RunReport",
    "SchemeKind",
    "State",
    "TangledCellError",
    "UnphysicalStateError",
    "UsageError",
    "VolumeFractionError",
    "VortexKind",
    "VortexSpec",
    "bbc_stability_bound",
    "bbc_vs_glace_crossover",
    "build_case",
    "case_names",
    "cfl_dt",
    "convergence_study",
    "discrete_curl",
    "initial_case_state",
    "l2_error",
    "linadv_o1_update",
    "load_config",
    "one_step_curl_ratio",
    "parse_config",
    "ratio_table",
    "remap",
    "single_node_corner_mass",
    "single_node_lag_volume",
    "write_convergence_table",
    "write_fields",
]
