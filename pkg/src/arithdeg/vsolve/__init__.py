"""Recovery and certification of the special fiber parameters."""
from arithdeg.vsolve.closure import (COORD_POINTS, PARAMS, ClosureSystem, OrbitPolys, PolyEval, closure_system,
                                     elimination_poly, orbit_polys, system_from_polys)
from arithdeg.vsolve.cusp import (CUBIC, STAGES, BasinReport, CertificationError, CuspCertificate, FixedPoint,
                                  StageResult, basin_check, certify_cusp, choose_radius, closure_control,
                                  fixed_point)
from arithdeg.vsolve.newton import (ParamSolution, SolutionList, chordal, grid_starts, lift_minpoly, orbit_margins,
                                    seed_orbit, solve_newton)
from arithdeg.vsolve.pipeline import ParamReport, solve_params

__all__ = [
    "COORD_POINTS", "CUBIC", "PARAMS", "STAGES", "BasinReport", "CertificationError", "ClosureSystem",
    "CuspCertificate", "FixedPoint", "OrbitPolys", "ParamReport", "ParamSolution", "PolyEval", "SolutionList",
    "StageResult", "basin_check", "certify_cusp", "chordal", "choose_radius", "closure_control", "closure_system",
    "elimination_poly", "fixed_point", "grid_starts", "lift_minpoly", "orbit_margins", "orbit_polys",
    "seed_orbit", "solve_newton", "solve_params", "system_from_polys",
]
