"""Base facts, structural flags and the propagation rules.

A rule looks at one node (its current intervals, its children's final reports
and, when the node has a structurally known predual, that predual's report)
and returns proposals.  Rules are monotone: tighter inputs never yield looser
proposals, so the fixpoint does not depend on the order of application.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from ..dsl import (INF, Atom, C0Sum, Dual, LpSum, SpaceExpr, SumP, Lp, Lp01, REALS,
                   _sump, conjugate, structurally_reflexive)
from .core import Derivation, IndexInterval, IndexReport, StructFlags, Tri


@dataclass(frozen=True)
class Proposal:
    quantity: str
    side: str  # "lower" or "upper"
    value: float
    rule_id: str
    strict: bool = False
    premises: tuple[Derivation, ...] = ()


@dataclass
class Context:
    expr: SpaceExpr
    flags: StructFlags
    state: Mapping[str, IndexInterval]
    children: tuple[IndexReport, ...]
    predual: Optional[IndexReport]


def _exact(q: str, v: float, rid: str, premises=()) -> list[Proposal]:
    return [Proposal(q, "lower", v, rid, False, premises),
            Proposal(q, "upper", v, rid, False, premises)]


def _prem(report: IndexReport, q: str) -> tuple[Derivation, ...]:
    return tuple(report.derivations.get(q, ()))


def _sharpen(p: float, s: float) -> float:
    """((s - 1)^p + 1)^(1/p), the lower bound a summand's thinness forces."""
    if s <= 1.0:
        return 1.0
    return ((s - 1.0) ** p + 1.0) ** (1.0 / p)


# -- flags ---------------------------------------------------------------------

_ATOM_FLAGS: dict[str, tuple[str, str, str]] = {
    # kind: (infinite_dim, lindenstrauss, has_extreme_points)
    "c0": ("yes", "yes", "no"),
    "c01": ("yes", "yes", "yes"),
    "cksplit": ("yes", "yes", "yes"),
    "xr": ("yes", "yes", "no"),
    "gurarii": ("yes", "yes", "no"),
    "reals": ("no", "yes", "yes"),
    "findim": ("no", "unknown", "yes"),
    "reflexive": ("yes", "no", "yes"),
}


def _tri(value: Optional[bool]) -> Tri:
    return "unknown" if value is None else ("yes" if value else "no")


def _both(a: str, b: str) -> str:
    if a == "yes" and b == "yes":
        return "yes"
    if a == "no" or b == "no":
        return "no"
    return "unknown"


def structural_flags(expr: SpaceExpr, kids: Sequence[StructFlags]) -> StructFlags:
    """Flags that follow from the shape of the expression alone."""
    refl = _tri(structurally_reflexive(expr))
    if isinstance(expr, Atom):
        if expr.kind in ("lp", "lp01"):
            p = expr.param
            lind = "yes" if p == INF else "no"
            ext = "no" if (expr.kind == "lp01" and p == 1) else "yes"
            return StructFlags("yes", refl, lind, ext)
        inf, lind, ext = _ATOM_FLAGS[expr.kind]
        return StructFlags(inf, refl, lind, ext)
    infinite = "yes" if any(k.infinite_dim == "yes" for k in kids) else "no"
    if isinstance(expr, (C0Sum, LpSum)):
        infinite = "yes"
    lind = ext = "unknown"
    if isinstance(expr, SumP) and expr.p == INF:
        lind = _both(kids[0].lindenstrauss, kids[1].lindenstrauss)
        ext = _both(kids[0].has_extreme_points, kids[1].has_extreme_points)
    elif isinstance(expr, C0Sum):
        lind = "yes" if all(k.lindenstrauss == "yes" for k in kids) else (
            "no" if any(k.lindenstrauss == "no" for k in kids) else "unknown")
        ext = "no"
    elif isinstance(expr, Dual):
        # dual balls are weak*-compact; biduals of L1-preduals are again L1-preduals
        ext = "yes"
        inner = expr.inner
        if isinstance(inner, Dual) and kids[0].lindenstrauss == "yes":
            lind = "yes"
    return StructFlags(infinite, refl, lind, ext)


# -- preduals ------------------------------------------------------------------

def predual(expr: SpaceExpr) -> Optional[SpaceExpr]:
    """A space whose dual is structurally isometric to ``expr``, if one is known."""
    if isinstance(expr, Dual):
        return expr.inner
    if isinstance(expr, Atom):
        if expr.kind == "lp":
            return Atom("c0") if expr.param == 1 else Lp(conjugate(expr.param))
        if expr.kind in ("reals", "findim"):
            return expr
        if expr.kind == "lp01" and expr.param > 1:
            return Lp01(conjugate(expr.param))
        if expr.kind == "reflexive":
            return Dual(expr)
        return None
    if isinstance(expr, SumP):
        a, b = predual(expr.left), predual(expr.right)
        if a is None or b is None:
            return None
        return _sump(conjugate(expr.p), a, b)
    if isinstance(expr, LpSum):
        pre = [predual(e) for e in expr.family]
        if any(e is None for e in pre):
            return None
        if expr.p == 1:
            return C0Sum(tuple(pre))
        return LpSum(conjugate(expr.p), tuple(pre))
    return None


# -- base facts ----------------------------------------------------------------

def base_proposals(atom: Atom) -> list[Proposal]:
    k, p = atom.kind, atom.param
    if k == "lp":
        if p == INF:
            return _exact("T", 1.0, "W-linf") + _exact("t", 2.0, "W-linf")
        v = 2.0 ** (1.0 / p)
        return _exact("T", v, "W-lp") + _exact("t", v, "W-lp")
    if k == "c0":
        return _exact("T", 1.0, "W-c0") + _exact("t", 1.0, "W-c0")
    if k == "lp01":
        if p == INF:
            return _exact("T", 2.0, "W-Linf") + _exact("t", 2.0, "W-Linf")
        v = 2.0 ** (1.0 / p)
        return _exact("T", v, "Lp01-T") + _exact("t", v, "Lp01-t")
    if k == "c01":
        return _exact("T", 2.0, "C01-T") + _exact("t", 2.0, "C01-t")
    if k == "cksplit":
        return (_exact("T", 1.0, "CK") + _exact("t", 2.0, "CK")
                + _exact("mu1", 1.5, "CK") + _exact("mu2", 1.5, "CK"))
    if k == "gurarii":
        return _exact("T", 2.0, "GUR") + _exact("t", 1.0, "GUR")
    if k == "xr":
        return _exact("t", 1.0 + 1.0 / p, "XR")
    return []


# -- rules ---------------------------------------------------------------------

def r_base(c: Context) -> list[Proposal]:
    return base_proposals(c.expr) if isinstance(c.expr, Atom) else []


def r0(c: Context) -> list[Proposal]:
    if c.flags.infinite_dim == "no":
        return _exact("T", 1.0, "R0") + _exact("t", 2.0, "R0")
    return []


def r1(c: Context) -> list[Proposal]:
    if isinstance(c.expr, C0Sum):
        return [Proposal("t", "upper", 1.0, "R1")]
    return []


def _min_interval(ivs: Sequence[IndexInterval]) -> tuple[float, bool, float, bool]:
    lo = min(iv.lo for iv in ivs)
    lo_strict = all(iv.lo_strict for iv in ivs if iv.lo == lo)
    hi = min(iv.hi for iv in ivs)
    hi_strict = any(iv.hi_strict for iv in ivs if iv.hi == hi)
    return lo, lo_strict, hi, hi_strict


def _min_rule(q: str, rid: str, kids: Sequence[IndexReport]) -> list[Proposal]:
    lo, ls, hi, hs = _min_interval([k[q] for k in kids])
    prem = tuple(d for k in kids for d in _prem(k, q))
    return [Proposal(q, "lower", lo, rid, ls, prem),
            Proposal(q, "upper", hi, rid, hs, prem)]


def r2(c: Context) -> list[Proposal]:
    if isinstance(c.expr, C0Sum):
        return _min_rule("T", "R2", c.children)
    return []


def _sharpen_rule(p: float, rid: str, kids: Sequence[IndexReport]) -> list[Proposal]:
    best = max(k["t"].lo for k in kids)
    strict = any(k["t"].lo_strict for k in kids if k["t"].lo == best)
    prem = tuple(d for k in kids if k["t"].lo == best for d in _prem(k, "t"))
    return [Proposal("t", "lower", _sharpen(p, best), rid, strict, prem)]


def r3(c: Context) -> list[Proposal]:
    if isinstance(c.expr, SumP) and c.expr.p < INF:
        return _sharpen_rule(c.expr.p, "R3", c.children)
    return []


def r4(c: Context) -> list[Proposal]:
    if isinstance(c.expr, SumP) and c.expr.p == 1:
        return _sharpen_rule(1.0, "R4", c.children)
    return []


def r5(c: Context) -> list[Proposal]:
    if not isinstance(c.expr, LpSum):
        return []
    p = c.expr.p
    full = [k for k in c.children if k["t"].lo == 2.0]
    if full:
        return _exact("t", 2.0 ** (1.0 / p), "R5", _prem(full[0], "t"))
    return _sharpen_rule(p, "R5", c.children)


def r6(c: Context) -> list[Proposal]:
    if isinstance(c.expr, SumP) and c.expr.p == INF:
        return _min_rule("t", "R6", c.children)
    return []


def r7(c: Context) -> list[Proposal]:
    if c.predual is not None and c.predual["t"].hi <= 1.0:
        return [Proposal("T", "lower", 2.0, "R7", False, _prem(c.predual, "t"))]
    return []


def _is_l1(e: SpaceExpr) -> bool:
    return isinstance(e, Atom) and e.kind == "lp" and e.param == 1


def r8(c: Context) -> list[Proposal]:
    e = c.expr
    if isinstance(e, SumP) and _is_l1(e.left) and _is_l1(e.right):
        return [Proposal("t", "lower", 2.0, "R8")]
    return []


def r9(c: Context) -> list[Proposal]:
    pre = c.predual
    if pre is None or pre.predual is None:
        return []
    w = pre.predual
    T, t = w["T"], w["t"]
    return [Proposal("T", "upper", T.hi, "R9", T.hi_strict, _prem(w, "T")),
            Proposal("t", "lower", t.lo, "R9", t.lo_strict, _prem(w, "t"))]


def r10(c: Context) -> list[Proposal]:
    s = c.state
    out = []
    for small, big in (("mu1", "t"), ("T", "mu2")):
        a, b = s[small], s[big]
        out.append(Proposal(big, "lower", a.lo, "R10", a.lo_strict))
        out.append(Proposal(small, "upper", b.hi, "R10", b.hi_strict))
    return out


def r11(c: Context) -> list[Proposal]:
    out = []
    if c.state["T"].lo >= 2.0:
        out.append(Proposal("mu2", "lower", 2.0, "R11"))
    if c.state["mu2"].lo >= 2.0:
        out.append(Proposal("T", "lower", 2.0, "R11"))
    return out


def r12(c: Context) -> list[Proposal]:
    if c.flags.reflexive != "yes":
        return []
    return [Proposal("t", "lower", 1.0, "R12", True),
            Proposal("T", "upper", 2.0, "R12", True)]


def r13(c: Context) -> list[Proposal]:
    e = c.expr
    if not isinstance(e, SumP):
        return []
    for y, z in ((0, 1), (1, 0)):
        other = (e.left, e.right)[z]
        fy = c.children[y].flags
        if other == REALS and fy.reflexive == "yes" and fy.infinite_dim == "yes":
            if e.p == INF:
                return [Proposal("T", "upper", 1.0, "R13")]
            if e.p == 1:
                return [Proposal("t", "lower", 2.0, "R13")]
    return []


def r14(c: Context) -> list[Proposal]:
    out = []
    f = c.flags
    if f.lindenstrauss == "yes" and f.has_extreme_points == "yes":
        out.append(Proposal("t", "lower", 2.0, "R14"))
    pre = c.predual
    if pre is not None and f.infinite_dim == "yes":
        if pre.flags.lindenstrauss == "yes":
            out.append(Proposal("T", "lower", 2.0, "R14"))
        if pre.predual is not None and pre.predual.flags.lindenstrauss == "yes":
            out.append(Proposal("t", "lower", 2.0, "R14"))
    return out


_L1 = Lp(1)
KNOWN_VALUES: dict[SpaceExpr, list[tuple[str, float]]] = {
    SumP(2, _L1, _L1): [("T", math.sqrt(2.0 + math.sqrt(2.0)))],
}


def r_known(c: Context) -> list[Proposal]:
    out = []
    for q, v in KNOWN_VALUES.get(c.expr, ()):
        out += _exact(q, v, "KF")
    return out


RuleFn = Callable[[Context], list[Proposal]]

RULES: dict[str, RuleFn] = {
    "BASE": r_base, "KF": r_known,
    "R0": r0, "R1": r1, "R2": r2, "R3": r3, "R4": r4, "R5": r5, "R6": r6,
    "R7": r7, "R8": r8, "R9": r9, "R10": r10, "R11": r11, "R12": r12,
    "R13": r13, "R14": r14,
}
DEFAULT_ORDER: tuple[str, ...] = tuple(RULES)
