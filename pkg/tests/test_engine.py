import math
import random

import pytest
from hypothesis import given

from banach_index.dsl import (C0, C01, CKSPLIT, GURARII, INF, REALS, REFLEXIVE, Atom,
                              C0Sum, Dual, FiniteDim, Lp, Lp01, LpSum, SumP, Xr, normalize,
                              parse)
from banach_index.engine import (CATALOG, DEFAULT_ORDER, QUANTITIES, ContradictionError,
                                 IndexInterval, IndexReport, StructFlags, analyze,
                                 apply_rules, base_facts, catalog_entries, explain, trace)

from strategies import random_expr, space_exprs

SQ2 = math.sqrt(2.0)


def exact(report, q, value, tol=1e-12):
    iv = report[q]
    return abs(iv.lo - value) <= tol and abs(iv.hi - value) <= tol


# -- intervals -------------------------------------------------------------------

def test_interval_tightening():
    iv = IndexInterval()
    iv = iv.with_lower(1.2).with_upper(1.8, strict=True)
    assert (iv.lo, iv.hi, iv.lo_strict, iv.hi_strict) == (1.2, 1.8, False, True)
    assert iv.with_lower(1.1) is iv
    assert iv.with_upper(1.8) is iv
    assert iv.with_lower(1.2, strict=True).lo_strict
    assert iv.contains(1.5) and not iv.contains(1.8) and iv.contains(1.2)


def test_interval_collapse_clears_strictness():
    iv = IndexInterval().with_lower(1.5).with_upper(1.5)
    assert iv.exact and not iv.lo_strict and not iv.hi_strict


def test_interval_contradiction():
    iv = IndexInterval(1.0, 1.5)
    with pytest.raises(ContradictionError):
        iv.with_lower(1.7)
    with pytest.raises(ContradictionError):
        iv.with_upper(1.5).with_lower(1.5, strict=True)
    with pytest.raises(ContradictionError):
        IndexInterval(1.5, 1.5, lo_strict=True)


def test_interval_round_off_is_absorbed():
    iv = IndexInterval(1.0, 1.5).with_lower(1.5 + 1e-14)
    assert iv.exact and iv.lo == 1.5


# -- base facts ------------------------------------------------------------------

@pytest.mark.parametrize("atom, T, t", [
    (Lp(2), SQ2, SQ2),
    (C0, 1.0, 1.0),
    (C01, 2.0, 2.0),
    (GURARII, 2.0, 1.0),
    (Lp(INF), 1.0, 2.0),
    (Lp01(INF), 2.0, 2.0),
    (Lp01(3), 2 ** (1 / 3), 2 ** (1 / 3)),
])
def test_base_facts(atom, T, t):
    r = base_facts(atom)
    assert exact(r, "T", T) and exact(r, "t", t)


def test_base_facts_flags_and_ck():
    assert base_facts(Lp(2)).flags.reflexive == "yes"
    r = base_facts(CKSPLIT)
    assert exact(r, "mu1", 1.5) and exact(r, "mu2", 1.5)
    assert exact(r, "T", 1.0) and exact(r, "t", 2.0)
    g = base_facts(GURARII).flags
    assert g.lindenstrauss == "yes" and g.has_extreme_points == "no"
    assert base_facts(Xr(2)).flags.lindenstrauss == "yes"


def test_base_facts_unknown_atom_defaults():
    r = base_facts(REFLEXIVE)
    assert all(r[q] == IndexInterval() for q in QUANTITIES)
    assert explain(r) == "no derived bounds; defaults [1,2]"


def test_base_facts_finite_dim():
    r = base_facts(FiniteDim(3))
    assert exact(r, "T", 1.0) and exact(r, "t", 2.0)
    assert r.flags.infinite_dim == "no"


def test_base_facts_rejects_non_atoms():
    with pytest.raises(TypeError):
        base_facts(C0Sum((Lp(2),)))


# -- rule examples ---------------------------------------------------------------

def test_c0sum_lp():
    r = analyze(C0Sum((Lp(2),)))
    assert exact(r, "t", 1.0) and exact(r, "T", SQ2)
    assert r.flags.almost_square == "yes"


def test_l1_sum_l1():
    r = analyze(SumP(2, Lp(1), Lp(1)))
    assert exact(r, "t", 2.0)
    assert exact(r, "T", math.sqrt(2 + SQ2))
    assert r["mu2"].lo == pytest.approx(math.sqrt(2 + SQ2), abs=1e-15)


def test_dual_of_c0sum_is_octahedral():
    r = analyze(Dual(C0Sum((Lp(2),))))
    assert exact(r, "T", 2.0)
    assert r.flags.octahedral == "yes"
    assert exact(r, "mu2", 2.0)


def test_inf_sum_takes_min():
    r = analyze(SumP(INF, Lp(2), Lp(3)))
    assert exact(r, "t", 2 ** (1 / 3))


def test_c0_closure():
    r = analyze(C0)
    assert exact(r, "T", 1.0) and exact(r, "t", 1.0) and exact(r, "mu1", 1.0)
    assert r["mu2"] == IndexInterval(1.0, 2.0)


def test_xr_and_its_dual():
    assert exact(analyze(Xr(2)), "t", 1.5)
    assert exact(analyze(Dual(Xr(2))), "T", 2.0)


def test_bidual_of_lindenstrauss_is_thick():
    assert exact(analyze(Dual(Dual(C01))), "t", 2.0)
    assert exact(analyze(Dual(Dual(Xr(3)))), "t", 2.0)


def test_bidual_inherits_thickness_upper_bound():
    # c0(l_2)** is the dual of l_1(l_2), whose predual is c0(l_2)
    r = analyze(Dual(LpSum(1, (Lp(2),))))
    assert r["T"].hi == pytest.approx(SQ2, abs=1e-15)


def test_reflexive_plus_reals():
    r = analyze(SumP(INF, REFLEXIVE, REALS))
    assert exact(r, "T", 1.0)
    r = analyze(SumP(1, REFLEXIVE, REALS))
    assert exact(r, "t", 2.0)


def test_reflexive_strictness():
    r = analyze(REFLEXIVE)
    assert r["t"].lo == 1.0 and r["t"].lo_strict
    assert r["T"].hi == 2.0 and r["T"].hi_strict
    assert r.flags.almost_square == "no" and r.flags.octahedral == "no"


def test_lpsum_with_thick_member():
    r = analyze(LpSum(2, (Lp(1),)))
    assert exact(r, "t", SQ2)


def test_ell1_sum_sharpening():
    r = analyze(SumP(3, Lp(2), C0))
    assert r["t"].lo == pytest.approx(((SQ2 - 1) ** 3 + 1) ** (1 / 3), abs=1e-15)


def test_finite_dimensional_sum():
    r = analyze(SumP(1, REALS, FiniteDim(3)))
    assert exact(r, "T", 1.0) and exact(r, "t", 2.0)


def test_mu_chain_does_not_force_almost_square():
    # mu1 = 1 must not be turned into t = 1
    r = analyze(SumP(INF, Xr(2), Xr(2)))
    assert exact(r, "t", 1.5)
    assert r["mu1"].lo == 1.0


def test_apply_rules_single_pass():
    kids = [analyze(Lp(2))]
    r = apply_rules(C0Sum((Lp(2),)), kids)
    assert exact(r, "t", 1.0) and exact(r, "T", SQ2)
    assert isinstance(r, IndexReport)


def test_rule_order_must_be_permutation():
    with pytest.raises(ValueError):
        analyze(C0, rule_order=["R1"])


# -- explain ---------------------------------------------------------------------

def test_explain_lines():
    text = explain(analyze(parse("c0sum(l(2))")))
    assert "t ≤ 1 by R1 [Lemma 2.3]" in text
    assert "T = 1.41421 by R2 [Lemma 2.5]" in text
    assert "T = 2 [Whitley]" in explain(analyze(parse("l(1)")))


def test_explain_empty_report():
    report = IndexReport(C0, {q: IndexInterval() for q in QUANTITIES}, StructFlags(),
                         {q: () for q in QUANTITIES})
    assert explain(report) == "no derived bounds; defaults [1,2]"


def test_catalog_is_complete():
    ids = {r.rule_id for r in catalog_entries()}
    for rid in ["R%d" % i for i in range(16)] + ["KF", "W-lp", "CK", "GUR", "XR"]:
        assert rid in ids
    assert all(r.citation for r in catalog_entries())


# -- properties ------------------------------------------------------------------

def _derivations(report):
    for q in QUANTITIES:
        stack = list(report.derivations[q])
        while stack:
            d = stack.pop()
            yield d
            stack.extend(d.premises)


def _check_report(r):
    iv = r.intervals
    assert iv["mu1"].lo <= iv["t"].hi
    assert iv["T"].lo <= iv["mu2"].hi
    if r.flags.infinite_dim == "yes":
        for q in QUANTITIES:
            assert 1.0 <= iv[q].lo <= iv[q].hi <= 2.0
    for d in _derivations(r):
        assert d.rule_id in CATALOG
        assert d.citation == CATALOG[d.rule_id].citation
    for q in QUANTITIES:
        lo_tight = iv[q].lo > 1 or iv[q].lo_strict
        hi_tight = iv[q].hi < 2 or iv[q].hi_strict
        if lo_tight or hi_tight:
            assert r.derivations[q], q
    assert (r.flags.almost_square == "yes") == (iv["t"].lo == iv["t"].hi == 1.0)
    assert (r.flags.octahedral == "yes") == (iv["T"].lo == iv["T"].hi == 2.0)
    if r.flags.reflexive == "yes":
        if iv["t"].lo == 1.0:
            assert iv["t"].lo_strict
        if iv["T"].hi == 2.0:
            assert iv["T"].hi_strict


@given(space_exprs)
def test_reports_are_consistent(expr):
    _check_report(analyze(expr))


@given(space_exprs)
def test_fixpoint_passes_only_shrink(expr):
    states = trace(expr)
    for before, after in zip(states, states[1:]):
        for q in QUANTITIES:
            assert after[q].lo >= before[q].lo
            assert after[q].hi <= before[q].hi
    assert states[-1] == analyze(expr).intervals


@given(space_exprs)
def test_r7_trigger(expr):
    r = analyze(expr)
    if r["t"].lo == r["t"].hi == 1.0:
        d = analyze(Dual(normalize(expr)))
        assert d["T"].lo == d["T"].hi == 2.0


def test_confluence_under_random_orders():
    rng = random.Random(20240601)
    for _ in range(30):
        e = random_expr(rng, 4)
        ref = analyze(e)
        for _ in range(10):
            order = list(DEFAULT_ORDER)
            rng.shuffle(order)
            assert analyze(e, order) == ref


@pytest.mark.parametrize("atom, values", [
    (Lp(1), {"T": 2.0, "t": 2.0}),
    (Lp(4), {"T": 2 ** 0.25, "t": 2 ** 0.25}),
    (Lp(INF), {"T": 1.0, "t": 2.0}),
    (Lp01(1.5), {"T": 2 ** (1 / 1.5), "t": 2 ** (1 / 1.5)}),
    (C01, {"T": 2.0, "t": 2.0}),
    (CKSPLIT, {"T": 1.0, "t": 2.0, "mu1": 1.5, "mu2": 1.5}),
    (GURARII, {"T": 2.0, "t": 1.0}),
    (Xr(10), {"t": 1.1}),
])
def test_closure_never_widens_base_facts(atom, values):
    r = analyze(atom)
    base = base_facts(atom)
    for q, v in values.items():
        assert exact(r, q, v)
        assert exact(base, q, v)


def test_dual_of_c0sum_with_reflexive_members_is_octahedral():
    # reflexive members have the dual of their dual as a predual
    e = C0Sum((REFLEXIVE, Dual(REFLEXIVE), C0Sum((LpSum(4, (C01, REFLEXIVE, C0)),))))
    assert exact(analyze(e), "t", 1.0)
    assert exact(analyze(Dual(e)), "T", 2.0)
    assert exact(analyze(Dual(C0Sum((Lp01(3),)))), "T", 2.0)
