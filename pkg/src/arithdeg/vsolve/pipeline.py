"""End-to-end recovery of (a_n, b_n): solve, certify, check the basin."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from arithdeg.spectral import delta
from arithdeg.vsolve.closure import COORD_POINTS, closure_system
from arithdeg.vsolve.cusp import BasinReport, CuspCertificate, certify_cusp, choose_radius
from arithdeg.vsolve.newton import ParamSolution, grid_starts, lift_minpoly, solve_newton


@dataclass
class ParamReport:
    n: int
    prec: int
    solution: ParamSolution | None = None
    certificate: CuspCertificate | None = None
    basin: BasinReport | None = None
    attempts: list = field(default_factory=list)
    delta_enclosure: object = None

    @property
    def status(self) -> str:
        if self.solution is None:
            return "no_solution"
        if self.certificate is None or not self.certificate.passed:
            return "certification_failed"
        if self.basin is None or not self.basin.passed:
            return "basin_failed"
        return "certified"

    def to_json(self) -> dict:
        sol = self.solution
        cert = self.certificate
        D = self.delta_enclosure
        return {
            "n": self.n,
            "target": list(COORD_POINTS[sol.target]) if sol else None,
            "a": sol.to_json()["a"] if sol else None,
            "b": sol.to_json()["b"] if sol else None,
            "precision_bits": self.prec,
            "residuals": sol.to_json()["residuals"] if sol else None,
            "eigenvalues": cert.to_json()["eigenvalues"] if cert else None,
            "delta_enclosure": [str(D.lo), str(D.hi)] if D is not None else None,
            "certificate_status": self.status,
            "certificate": cert.to_json() if cert else None,
            "basin": self.basin.to_json() if self.basin else None,
            "solution": sol.to_json() if sol else None,
            "attempts": self.attempts,
        }


def solve_params(n: int, prec: int = 256, *, starts=None, targets=(0, 1, 2), grid: int = 25, box: float = 3.0,
                 complex_samples: int = 200, seed: int = 0, basin_samples: int = 200,
                 lift: bool = False) -> ParamReport:
    """Try every target, certify each admissible solution, keep the first that passes."""
    D = delta(n, Fraction(1, 10**40))
    rep = ParamReport(n, prec, delta_enclosure=D)
    starts = starts or grid_starts(grid, box, complex_samples, seed)
    fallback = None
    for t in targets:
        sys = closure_system(n, t)
        sols = solve_newton(sys, starts, prec)
        attempt = {"target": list(COORD_POINTS[t]), "diagnostics": sols.diagnostics, "solutions": []}
        rep.attempts.append(attempt)
        for sol in sols:
            cert = certify_cusp(sol, D, prec)
            attempt["solutions"].append({"a": str(complex(sol.a)), "b": str(complex(sol.b)),
                                         "real": sol.is_real,
                                         "certificate": "certified" if cert.passed else f"failed:{cert.failed_stage}"})
            if cert.passed and rep.certificate is None:
                rep.solution, rep.certificate = sol, cert
            elif fallback is None:
                fallback = (sol, cert)
    if rep.solution is None:
        if fallback is not None:
            rep.solution, rep.certificate = fallback
        return rep
    rep.basin = choose_radius(rep.solution, rep.certificate, samples=basin_samples, seed=seed)
    rep.certificate.contraction = rep.basin.to_json()
    if lift and rep.solution.is_real:
        rep.solution.minpoly = {"a": lift_minpoly(rep.solution.a), "b": lift_minpoly(rep.solution.b)}
    return rep
