"""Value types of the index engine."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping, Optional

from ..dsl import SpaceExpr, format_expr

QUANTITIES = ("T", "t", "mu1", "mu2")
Quantity = Literal["T", "t", "mu1", "mu2"]
Tri = Literal["yes", "no", "unknown"]

EPS = 1e-12


class ContradictionError(RuntimeError):
    """A bound would empty an interval; points at a bug in the rule catalog."""


@dataclass(frozen=True)
class IndexInterval:
    """Closed sub-interval of [0, 2]; a strict flag opens that endpoint."""

    lo: float = 1.0
    hi: float = 2.0
    lo_strict: bool = False
    hi_strict: bool = False

    def __post_init__(self):
        if not (0.0 <= self.lo and self.hi <= 2.0 + EPS):
            raise ValueError(f"interval [{self.lo}, {self.hi}] leaves [0, 2]")
        if self.lo > self.hi:
            raise ContradictionError(f"empty interval [{self.lo}, {self.hi}]")
        if self.lo == self.hi and (self.lo_strict or self.hi_strict):
            raise ContradictionError(f"degenerate interval at {self.lo} with an open end")

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def with_lower(self, value: float, strict: bool = False) -> "IndexInterval":
        if value < self.lo or (value == self.lo and (self.lo_strict or not strict)):
            return self
        lo, hi = value, self.hi
        if lo > hi:
            if lo - hi > EPS:
                raise ContradictionError(
                    f"lower bound {value} exceeds upper bound {self.hi}")
            lo = hi
        if lo == hi and (strict or self.hi_strict):
            raise ContradictionError(f"bound {value} closes an open endpoint")
        return IndexInterval(lo, hi, strict and lo < hi, self.hi_strict and lo < hi)

    def with_upper(self, value: float, strict: bool = False) -> "IndexInterval":
        if value > self.hi or (value == self.hi and (self.hi_strict or not strict)):
            return self
        lo, hi = self.lo, value
        if lo > hi:
            if lo - hi > EPS:
                raise ContradictionError(
                    f"upper bound {value} is below lower bound {self.lo}")
            hi = lo
        if lo == hi and (strict or self.lo_strict):
            raise ContradictionError(f"bound {value} closes an open endpoint")
        return IndexInterval(lo, hi, self.lo_strict and lo < hi, strict and lo < hi)

    def contains(self, x: float) -> bool:
        above = x > self.lo if self.lo_strict else x >= self.lo
        below = x < self.hi if self.hi_strict else x <= self.hi
        return above and below

    def __str__(self) -> str:
        left = "(" if self.lo_strict else "["
        right = ")" if self.hi_strict else "]"
        return f"{left}{self.lo:.12g}, {self.hi:.12g}{right}"

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi,
                "lo_strict": self.lo_strict, "hi_strict": self.hi_strict}


DEFAULT = IndexInterval()


@dataclass(frozen=True)
class Derivation:
    quantity: str
    bound: Literal["lower", "upper", "exact"]
    value: float
    rule_id: str
    citation: str
    premises: tuple["Derivation", ...] = ()
    strict: bool = False

    def to_dict(self) -> dict:
        return {"quantity": self.quantity, "bound": self.bound, "value": self.value,
                "strict": self.strict, "rule_id": self.rule_id,
                "citation": self.citation,
                "premises": [p.to_dict() for p in self.premises]}


@dataclass(frozen=True)
class StructFlags:
    infinite_dim: Literal["yes", "no"] = "yes"
    reflexive: Tri = "unknown"
    lindenstrauss: Tri = "unknown"
    has_extreme_points: Tri = "unknown"
    almost_square: Tri = "unknown"
    octahedral: Tri = "unknown"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class IndexReport:
    expr: SpaceExpr
    intervals: Mapping[str, IndexInterval]
    flags: StructFlags
    derivations: Mapping[str, tuple[Derivation, ...]]
    predual: Optional["IndexReport"] = field(default=None, compare=False, repr=False)
    passes: int = field(default=0, compare=False)

    def __getitem__(self, quantity: str) -> IndexInterval:
        return self.intervals[quantity]

    def to_dict(self) -> dict:
        return {"expr": format_expr(self.expr),
                "intervals": {q: self.intervals[q].to_dict() for q in QUANTITIES},
                "flags": self.flags.to_dict(),
                "derivations": {q: [d.to_dict() for d in self.derivations.get(q, ())]
                                for q in QUANTITIES}}
