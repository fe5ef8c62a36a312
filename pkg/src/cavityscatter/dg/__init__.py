"""Discontinuous-Galerkin spectral-element solver on hexahedral meshes.

Continuous spectral elements inside each material block, SIPG coupling
across the acoustic-elastic interface and non-conforming block boundaries,
paraxial absorbing tractions on the outer surface, and leap-frog time
integration of  M0 u'' + M1 u' + (M2 + A) u = F(t).
"""

from .dofmap import DofMap, build_dofmap
from .assembly import SemiDiscreteSystem, assemble_system, trace_jump_average
from .cfl import cfl_formula, cfl_dt, min_gll_spacing
from .leapfrog import LeapfrogResult, StabilityError, leapfrog_run
from .sources import PlaneForceSource, ScatteredFieldSource

__all__ = [
    "DofMap", "build_dofmap", "SemiDiscreteSystem", "assemble_system",
    "trace_jump_average", "cfl_formula", "cfl_dt", "min_gll_spacing",
    "LeapfrogResult", "StabilityError", "leapfrog_run",
    "PlaneForceSource", "ScatteredFieldSource",
]
