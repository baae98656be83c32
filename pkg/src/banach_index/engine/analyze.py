"""Fixpoint propagation over a normalized expression tree."""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Optional, Sequence

from ..dsl import Atom, SpaceExpr, children, format_expr, normalize
from .catalog import CATALOG, CATALOG_ORDER, citation
from .core import (DEFAULT, QUANTITIES, Derivation, IndexInterval, IndexReport,
                   StructFlags)
from .rules import (DEFAULT_ORDER, RULES, Context, Proposal, predual,
                    structural_flags)

MAX_PASSES = 100
_PREDUAL_DEPTH = 8


def _apply(state: dict[str, IndexInterval], props: Iterable[Proposal]) -> None:
    for pr in props:
        iv = state[pr.quantity]
        if pr.side == "lower":
            state[pr.quantity] = iv.with_lower(pr.value, pr.strict)
        else:
            state[pr.quantity] = iv.with_upper(pr.value, pr.strict)


def _one_pass(ctx: Context, order: Sequence[str]) -> dict[str, IndexInterval]:
    state = dict(ctx.state)
    for rid in order:
        ctx.state = state
        _apply(state, RULES[rid](ctx))
    return state


def _tightens(iv: IndexInterval, side: str) -> bool:
    if side == "lower":
        return iv.lo > DEFAULT.lo or iv.lo_strict
    return iv.hi < DEFAULT.hi or iv.hi_strict


def _matches(pr: Proposal, iv: IndexInterval) -> bool:
    if pr.side == "lower":
        return pr.value == iv.lo and pr.strict == iv.lo_strict
    return pr.value == iv.hi and pr.strict == iv.hi_strict


def _attribute(state: dict[str, IndexInterval],
               props: list[Proposal]) -> dict[str, tuple[Derivation, ...]]:
    """Explain every tightened endpoint by the first catalog rule that attains it.

    Choosing by catalog position instead of by history keeps the derivations
    independent of the order in which rules happened to fire.
    """
    ranked = sorted(props, key=lambda pr: CATALOG_ORDER[pr.rule_id])
    out: dict[str, tuple[Derivation, ...]] = {}
    for q in QUANTITIES:
        iv = state[q]
        first = {}
        for side in ("lower", "upper"):
            first[side] = next((pr for pr in ranked if pr.quantity == q
                                and pr.side == side and _matches(pr, iv)), None)
        derivs = []
        if iv.exact:
            both = [pr for pr in ranked if pr.quantity == q and _matches(pr, iv)]
            ids = {}
            for pr in both:
                ids.setdefault(pr.rule_id, set()).add(pr.side)
            exact_id = next((rid for rid, sides in ids.items() if len(sides) == 2), None)
            if exact_id is not None:
                pr = next(p for p in both if p.rule_id == exact_id)
                derivs.append(Derivation(q, "exact", iv.lo, exact_id, citation(exact_id),
                                         pr.premises))
                out[q] = tuple(derivs)
                continue
        for side in ("lower", "upper"):
            pr = first[side]
            if pr is not None and _tightens(iv, side):
                derivs.append(Derivation(q, side, pr.value, pr.rule_id,
                                         citation(pr.rule_id), pr.premises, pr.strict))
        out[q] = tuple(derivs)
    return out


def _tri_from(iv: IndexInterval, target: float) -> str:
    if iv.exact and iv.lo == target:
        return "yes"
    if not iv.contains(target):
        return "no"
    return "unknown"


@lru_cache(maxsize=4096)
def _analyze(expr: SpaceExpr, order: tuple[str, ...], guard: int) -> IndexReport:
    kids = tuple(_analyze(c, order, guard) for c in children(expr))
    flags = structural_flags(expr, [k.flags for k in kids])
    pre_report: Optional[IndexReport] = None
    if flags.reflexive != "yes" and guard > 0:
        pre = predual(expr)
        if pre is not None and pre != expr:
            pre_report = _analyze(pre, order, guard - 1)
    ctx = Context(expr, flags, {q: DEFAULT for q in QUANTITIES}, kids, pre_report)
    state = dict(ctx.state)
    passes = 0
    for passes in range(1, MAX_PASSES + 1):
        ctx.state = state
        new = _one_pass(ctx, order)
        if new == state:
            break
        state = new
    ctx.state = state
    props = [pr for rid in order for pr in RULES[rid](ctx)]
    derivations = _attribute(state, props)
    flags = StructFlags(flags.infinite_dim, flags.reflexive, flags.lindenstrauss,
                        flags.has_extreme_points,
                        almost_square=_tri_from(state["t"], 1.0),
                        octahedral=_tri_from(state["T"], 2.0))
    return IndexReport(expr, state, flags, derivations, pre_report, passes)


def _check_order(rule_order: Optional[Sequence[str]]) -> tuple[str, ...]:
    if rule_order is None:
        return DEFAULT_ORDER
    order = tuple(rule_order)
    if sorted(order) != sorted(DEFAULT_ORDER):
        raise ValueError(f"rule order must be a permutation of {DEFAULT_ORDER}")
    return order


def analyze(expr: SpaceExpr, rule_order: Optional[Sequence[str]] = None) -> IndexReport:
    """Normalize ``expr`` and propagate bounds to a fixpoint at every node."""
    return _analyze(normalize(expr), _check_order(rule_order), _PREDUAL_DEPTH)


def base_facts(atom: Atom) -> IndexReport:
    """Report built from the catalogued facts about one atom, before propagation."""
    if not isinstance(atom, Atom):
        raise TypeError("base_facts takes an atom")
    flags = structural_flags(atom, [])
    ctx = Context(atom, flags, {q: DEFAULT for q in QUANTITIES}, (), None)
    order = ("BASE", "R0")
    state = _one_pass(ctx, order)
    ctx.state = state
    props = [pr for rid in order for pr in RULES[rid](ctx)]
    return IndexReport(atom, state, flags, _attribute(state, props))


def apply_rules(expr: SpaceExpr, child_reports: Sequence[IndexReport],
                predual_report: Optional[IndexReport] = None,
                rule_order: Optional[Sequence[str]] = None) -> IndexReport:
    """One pass of every applicable rule at a single node, starting from defaults."""
    flags = structural_flags(expr, [k.flags for k in child_reports])
    ctx = Context(expr, flags, {q: DEFAULT for q in QUANTITIES},
                  tuple(child_reports), predual_report)
    order = _check_order(rule_order)
    state = _one_pass(ctx, order)
    ctx.state = state
    props = [pr for rid in order for pr in RULES[rid](ctx)]
    return IndexReport(expr, state, flags, _attribute(state, props), predual_report, 1)


def trace(expr: SpaceExpr, rule_order: Optional[Sequence[str]] = None
          ) -> list[dict[str, IndexInterval]]:
    """Root intervals after each fixpoint pass, starting with the defaults."""
    expr = normalize(expr)
    order = _check_order(rule_order)
    final = _analyze(expr, order, _PREDUAL_DEPTH)
    kids = tuple(_analyze(c, order, _PREDUAL_DEPTH) for c in children(expr))
    flags = structural_flags(expr, [k.flags for k in kids])
    ctx = Context(expr, flags, {q: DEFAULT for q in QUANTITIES}, kids, final.predual)
    states = [dict(ctx.state)]
    for _ in range(MAX_PASSES):
        ctx.state = states[-1]
        new = _one_pass(ctx, order)
        if new == states[-1]:
            break
        states.append(new)
    return states


# -- rendering -----------------------------------------------------------------

_SYMBOL = {"T": "T", "t": "t", "mu1": "mu1", "mu2": "mu2"}
_RELATION = {"lower": "≥", "upper": "≤", "exact": "="}


def _derivation_line(d: Derivation) -> str:
    rel = _RELATION[d.bound]
    if d.strict:
        rel = {"≥": ">", "≤": "<"}[rel]
    head = f"{_SYMBOL[d.quantity]} {rel} {d.value:.6g}"
    rule = CATALOG[d.rule_id]
    if rule.kind == "fact":
        return f"{head} [{d.citation}]"
    return f"{head} by {d.rule_id} [{d.citation}]"


def explain(report: IndexReport) -> str:
    """Human-readable derivation lines, one per tightened bound."""
    lines = []
    for q in QUANTITIES:
        for d in report.derivations.get(q, ()):
            lines.append(_derivation_line(d))
    if not lines:
        return "no derived bounds; defaults [1,2]"
    return "\n".join(lines)


def summary(report: IndexReport) -> str:
    head = format_expr(report.expr)
    rows = [f"{q:>4} ∈ {report.intervals[q]}" for q in QUANTITIES]
    f = report.flags
    rows.append(f"flags: infinite_dim={f.infinite_dim} reflexive={f.reflexive} "
                f"lindenstrauss={f.lindenstrauss} ext={f.has_extreme_points} "
                f"almost_square={f.almost_square} octahedral={f.octahedral}")
    return "\n".join([head] + rows)
