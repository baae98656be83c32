"""Thickness, thinness and Yost indices of Banach spaces.

Three layers: a small expression language for spaces built from classical
atoms, an interval engine that propagates known bounds through direct sums
and duals, and a numerical oracle that evaluates witness-family estimates on
finite-dimensional models.
"""
from .dsl import (C0, C01, CKSPLIT, GURARII, REALS, REFLEXIVE, Atom, C0Sum, DomainError,
                  DslError, DslSyntaxError, Dual, FiniteDim, Lp, Lp01, LpSum, SumP, Xr,
                  format_expr, normalize, parse)
from .engine import (ContradictionError, IndexInterval, IndexReport, analyze, apply_rules,
                     base_facts, explain)
from .models import (GridCK, LpCoords, PSum, RenormMax, WitnessFamily, norm, truncate)
from .oracle import (OptConfig, OracleResult, eval_inf_max, eval_mu, eval_sup_min,
                     f_theta_xi, renorm_cover_demo, verify_cover)

__version__ = "0.1.0"

__all__ = [
    "C0", "C01", "CKSPLIT", "GURARII", "REALS", "REFLEXIVE", "Atom", "C0Sum",
    "DomainError", "DslError", "DslSyntaxError", "Dual", "FiniteDim", "Lp", "Lp01",
    "LpSum", "SumP", "Xr", "format_expr", "normalize", "parse",
    "ContradictionError", "IndexInterval", "IndexReport", "analyze", "apply_rules",
    "base_facts", "explain",
    "GridCK", "LpCoords", "PSum", "RenormMax", "WitnessFamily", "norm", "truncate",
    "OptConfig", "OracleResult", "eval_inf_max", "eval_mu", "eval_sup_min",
    "f_theta_xi", "renorm_cover_demo", "verify_cover",
]
