"""The rule catalog: every id a Derivation may carry, with its statement and source."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Rule:
    rule_id: str
    statement: str
    citation: str
    kind: str = "rule"  # "fact" for atom base facts and the known-value table

    def to_dict(self) -> dict:
        return {"rule_id": self.rule_id, "statement": self.statement,
                "citation": self.citation, "kind": self.kind}


_ENTRIES = [
    # base facts on atoms
    Rule("W-lp", "T(l_p) = t(l_p) = 2^(1/p) for 1 <= p < inf", "Whitley", "fact"),
    Rule("W-c0", "T(c_0) = 1 and t(c_0) = 1", "Whitley", "fact"),
    Rule("W-linf", "T(l_inf) = 1 and t(l_inf) = 2", "Whitley", "fact"),
    Rule("W-Linf", "T(L_inf[0,1]) = t(L_inf[0,1]) = 2", "Whitley, Lemmas 3 and 8", "fact"),
    Rule("Lp01-T", "T(L_p[0,1]) = 2^(1/p) for 1 <= p < inf", "[BJ], [CPS]", "fact"),
    Rule("Lp01-t", "t(L_p[0,1]) = 2^(1/p) for 1 <= p < inf",
         "[MP, Theorem 6.3] upper bound; Haller step functions", "fact"),
    Rule("C01-T", "T(C[0,1]) = 2", "Whitley, Lemma 3", "fact"),
    Rule("C01-t", "t(C[0,1]) = 2", "Whitley, Lemma 8", "fact"),
    Rule("CK", "K = {c} u [a,b]: mu1(C(K)) = mu2(C(K)) = 3/2, T = 1, t = 2",
         "Papini, Example 2", "fact"),
    Rule("GUR", "Gurarii spaces: T = 2 and t = 1", "Prop 3.3", "fact"),
    Rule("XR", "t(X_r) = 1 + 1/r for X_r = {f in C[0,1] : f(0) = r f(1)}",
         "Prop 3.6 (proof)", "fact"),
    Rule("KF", "T(l_1 (+)_2 l_1) = sqrt(2 + sqrt(2))", "[CPS, Lemma 2]", "fact"),
    # propagation rules
    Rule("R0", "finite-dimensional spaces: T = 1 and t = 2",
         "Sec. 1, finite-dimensional convention"),
    Rule("R1", "t(c_0(X_n)) = 1", "Lemma 2.3"),
    Rule("R2", "T(c_0(X_n)) = inf_n T(X_n)", "Lemma 2.5"),
    Rule("R3", "t(Y (+)_p Z) >= ((t(Y) - 1)^p + 1)^(1/p) for p < inf, either summand",
         "Prop 2.9"),
    Rule("R4", "t(X (+)_1 Y) >= max{t(X), t(Y)}", "Cor 2.11(i)"),
    Rule("R5", "t(l_p(X_j)) >= sup_j ((t(X_j) - 1)^p + 1)^(1/p); "
               "= 2^(1/p) when some t(X_j) = 2", "Cor 2.11(ii)"),
    Rule("R6", "t(X (+)_inf Y) = min{t(X), t(Y)}", "Prop 2.12"),
    Rule("R7", "t(X) = 1 implies T(X*) = 2", "Prop 2.1"),
    Rule("R8", "t(l_1 (+)_p l_1) = 2 for 1 <= p <= inf", "Prop 2.13"),
    Rule("R9", "X ai-ideal in X**: T(X**) <= T(X) and t(X) <= t(X**)", "Prop 3.1"),
    Rule("R10", "1 <= mu1 <= t <= 2 and 1 <= T <= mu2 <= 2", "Sec. 1, ordering chain"),
    Rule("R11", "T = 2 if and only if mu2 = 2", "Papini, Theorem 2.1"),
    Rule("R12", "reflexive spaces: t > 1 and T < 2", "Sec. 2, reflexive spaces"),
    Rule("R13", "Y infinite-dimensional reflexive: T(Y (+)_inf R) = 1 and t(Y (+)_1 R) = 2",
         "Prop 2.8 (proof)"),
    Rule("R14", "Lindenstrauss X: t(X) = 2 if ext(B_X) is nonempty; "
                "T(X*) = 2 and t(X**) = 2", "Prop 3.6"),
    Rule("R15", "reflexivity: finite sums of reflexive spaces and l_p-sums (1<p<inf) of "
                "reflexive spaces are reflexive; c_0-sums are not; duality preserves it",
         "standard facts", "flags"),
]

CATALOG: dict[str, Rule] = {r.rule_id: r for r in _ENTRIES}
CATALOG_ORDER: dict[str, int] = {r.rule_id: i for i, r in enumerate(_ENTRIES)}


def citation(rule_id: str) -> str:
    return CATALOG[rule_id].citation


def catalog_entries() -> list[Rule]:
    return list(_ENTRIES)
