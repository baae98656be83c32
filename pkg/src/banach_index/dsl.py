"""Banach-space expressions: AST, parser, formatter and normalizer.

Grammar (identifiers are case-insensitive, except that ``l`` and ``L``
are distinct atoms, sequence l_p and function-space L_p[0,1])::

    expr   := atom | "sum" "(" pval "," expr "," expr ")"
            | "c0sum" "(" exprlist ")" | "lpsum" "(" pval "," exprlist ")"
            | "dual" "(" expr ")"
    atom   := "l" "(" pval ")" | "c0" | "L" "(" pval ")" | "c01" | "cksplit"
            | "xr" "(" num ")" | "gurarii" | "reals" | "findim" "(" int ")"
            | "reflexive"
    pval   := num | "inf"
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Union

INF = math.inf

ATOM_KINDS = ("lp", "c0", "lp01", "c01", "cksplit", "xr", "gurarii",
              "reals", "findim", "reflexive")
PARAM_KINDS = {"lp", "lp01", "xr", "findim"}


class DslError(ValueError):
    """Base class for expression errors."""


class DslSyntaxError(DslError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class DomainError(DslError):
    def __init__(self, message: str, position: Optional[int] = None):
        text = message if position is None else f"{message} at position {position}"
        super().__init__(text)
        self.position = position


@dataclass(frozen=True)
class Atom:
    kind: str
    param: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ATOM_KINDS:
            raise DomainError(f"unknown atom kind {self.kind!r}")
        if (self.kind in PARAM_KINDS) != (self.param is not None):
            raise DomainError(f"atom {self.kind!r} parameter mismatch")
        if self.kind in ("lp", "lp01"):
            _check_p(self.param)
            object.__setattr__(self, "param", float(self.param))
        elif self.kind == "xr":
            if not (math.isfinite(self.param) and self.param > 1):
                raise DomainError("r must be > 1")
            object.__setattr__(self, "param", float(self.param))
        elif self.kind == "findim":
            if int(self.param) != self.param or self.param < 1:
                raise DomainError("findim dimension must be a positive integer")
            object.__setattr__(self, "param", int(self.param))


@dataclass(frozen=True)
class SumP:
    p: float
    left: "SpaceExpr"
    right: "SpaceExpr"

    def __post_init__(self):
        _check_p(self.p)
        object.__setattr__(self, "p", float(self.p))


@dataclass(frozen=True)
class C0Sum:
    family: tuple["SpaceExpr", ...]

    def __post_init__(self):
        fam = tuple(self.family)
        if not fam:
            raise DomainError("c0sum family must be nonempty")
        object.__setattr__(self, "family", fam)


@dataclass(frozen=True)
class LpSum:
    p: float
    family: tuple["SpaceExpr", ...]

    def __post_init__(self):
        _check_p(self.p)
        if self.p == INF:
            raise DomainError("lpsum requires finite p")
        fam = tuple(self.family)
        if not fam:
            raise DomainError("lpsum family must be nonempty")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "family", fam)


@dataclass(frozen=True)
class Dual:
    inner: "SpaceExpr"


SpaceExpr = Union[Atom, SumP, C0Sum, LpSum, Dual]


def _check_p(p) -> None:
    if p is None or math.isnan(p) or p < 1:
        raise DomainError("p must be ≥ 1")


# Convenience constructors.
def Lp(p: float) -> Atom:
    return Atom("lp", p)


def Lp01(p: float) -> Atom:
    return Atom("lp01", p)


def Xr(r: float) -> Atom:
    return Atom("xr", r)


def FiniteDim(n: int) -> Atom:
    return Atom("findim", n)


C0 = Atom("c0")
C01 = Atom("c01")
CKSPLIT = Atom("cksplit")
GURARII = Atom("gurarii")
REALS = Atom("reals")
REFLEXIVE = Atom("reflexive")


def children(expr: SpaceExpr) -> tuple:
    if isinstance(expr, SumP):
        return (expr.left, expr.right)
    if isinstance(expr, (C0Sum, LpSum)):
        return expr.family
    if isinstance(expr, Dual):
        return (expr.inner,)
    return ()


def depth(expr: SpaceExpr) -> int:
    return 1 + max((depth(c) for c in children(expr)), default=0)


# -- formatting ----------------------------------------------------------------

def format_num(x: float) -> str:
    if x == INF:
        return "inf"
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


_ATOM_NAMES = {"c0": "c0", "c01": "c01", "cksplit": "cksplit",
               "gurarii": "gurarii", "reals": "reals", "reflexive": "reflexive"}


def format_expr(expr: SpaceExpr) -> str:
    if isinstance(expr, Atom):
        if expr.kind == "lp":
            return f"l({format_num(expr.param)})"
        if expr.kind == "lp01":
            return f"L({format_num(expr.param)})"
        if expr.kind == "xr":
            return f"xr({format_num(expr.param)})"
        if expr.kind == "findim":
            return f"findim({expr.param})"
        return _ATOM_NAMES[expr.kind]
    if isinstance(expr, SumP):
        return (f"sum({format_num(expr.p)}, {format_expr(expr.left)}, "
                f"{format_expr(expr.right)})")
    if isinstance(expr, C0Sum):
        return f"c0sum({', '.join(format_expr(e) for e in expr.family)})"
    if isinstance(expr, LpSum):
        return (f"lpsum({format_num(expr.p)}, "
                f"{', '.join(format_expr(e) for e in expr.family)})")
    if isinstance(expr, Dual):
        return f"dual({format_expr(expr.inner)})"
    raise TypeError(f"not a space expression: {expr!r}")


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),])
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.advance()
        if text != value:
            found = "end of input" if kind == "eof" else repr(text)
            raise DslSyntaxError(f"expected {value!r}, found {found}", pos)

    def pval(self) -> tuple[float, int]:
        kind, text, pos = self.advance()
        if kind == "num":
            return float(text), pos
        if kind == "ident" and text.lower() == "inf":
            return INF, pos
        raise DslSyntaxError("expected a number or 'inf'", pos)

    def expr(self) -> SpaceExpr:
        kind, text, pos = self.advance()
        if kind != "ident":
            found = "end of input" if kind == "eof" else repr(text)
            raise DslSyntaxError(f"expected an expression, found {found}", pos)
        name = text if text in ("l", "L") else text.lower()
        try:
            return self._dispatch(name, pos)
        except DomainError as err:
            if err.position is not None:
                raise
            raise DomainError(str(err), pos) from None

    def _dispatch(self, name: str, pos: int) -> SpaceExpr:
        if name in ("l", "L"):
            self.expect("(")
            p, ppos = self.pval()
            self.expect(")")
            if p < 1:
                raise DomainError("p must be ≥ 1", ppos)
            return Atom("lp" if name == "l" else "lp01", p)
        if name == "xr":
            self.expect("(")
            r, rpos = self.pval()
            self.expect(")")
            if not (math.isfinite(r) and r > 1):
                raise DomainError("r must be > 1", rpos)
            return Atom("xr", r)
        if name == "findim":
            self.expect("(")
            kind, text, npos = self.advance()
            if kind != "num" or not re.fullmatch(r"\d+", text):
                raise DslSyntaxError("expected a positive integer", npos)
            self.expect(")")
            if int(text) < 1:
                raise DomainError("findim dimension must be a positive integer", npos)
            return Atom("findim", int(text))
        if name in _ATOM_NAMES:
            return Atom(name)
        if name == "sum":
            self.expect("(")
            p, ppos = self.pval()
            if p < 1:
                raise DomainError("p must be ≥ 1", ppos)
            self.expect(",")
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect(")")
            return SumP(p, left, right)
        if name == "c0sum":
            self.expect("(")
            fam = self.exprlist()
            self.expect(")")
            return C0Sum(tuple(fam))
        if name == "lpsum":
            self.expect("(")
            p, ppos = self.pval()
            if p < 1:
                raise DomainError("p must be ≥ 1", ppos)
            if p == INF:
                raise DomainError("lpsum requires finite p", ppos)
            self.expect(",")
            fam = self.exprlist()
            self.expect(")")
            return LpSum(p, tuple(fam))
        if name == "dual":
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return Dual(inner)
        raise DslSyntaxError(f"unknown space {name!r}", pos)

    def exprlist(self) -> list[SpaceExpr]:
        items = [self.expr()]
        while self.peek()[1] == ",":
            self.advance()
            items.append(self.expr())
        return items


def parse(text: str) -> SpaceExpr:
    """Parse an expression; raises DslSyntaxError or DomainError."""
    parser = _Parser(text)
    expr = parser.expr()
    kind, tail, pos = parser.peek()
    if kind != "eof":
        raise DslSyntaxError(f"unexpected trailing input {tail!r}", pos)
    return expr


# -- normalization -------------------------------------------------------------

def conjugate(p: float) -> float:
    """Hoelder conjugate, snapped to an integer when within round-off of one."""
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    q = p / (p - 1.0)
    if abs(q - round(q)) < 1e-12 * q:
        q = float(round(q))
    return q


def structurally_reflexive(expr: SpaceExpr) -> Optional[bool]:
    """True/False when reflexivity follows from the structure, else None."""
    if isinstance(expr, Atom):
        if expr.kind in ("lp", "lp01"):
            return 1 < expr.param < INF
        if expr.kind in ("reals", "findim", "reflexive"):
            return True
        return False
    if isinstance(expr, SumP):
        a, b = structurally_reflexive(expr.left), structurally_reflexive(expr.right)
        if a is False or b is False:
            return False
        return True if (a and b) else None
    if isinstance(expr, C0Sum):
        return False
    if isinstance(expr, LpSum):
        if expr.p == 1:
            return False
        flags = [structurally_reflexive(e) for e in expr.family]
        if any(f is False for f in flags):
            return False
        return True if all(flags) else None
    if isinstance(expr, Dual):
        return structurally_reflexive(expr.inner)
    return None


def _sort_key(expr: SpaceExpr) -> str:
    return format_expr(expr)


def _sump(p: float, a: SpaceExpr, b: SpaceExpr) -> SumP:
    if _sort_key(b) < _sort_key(a):
        a, b = b, a
    return SumP(p, a, b)


def _dual_of(expr: SpaceExpr) -> SpaceExpr:
    """Normalized form of the dual of an already normalized expression."""
    if isinstance(expr, Atom):
        if expr.kind == "c0":
            return Lp(1)
        if expr.kind == "lp" and expr.param < INF:
            return Lp(conjugate(expr.param))
        if expr.kind in ("reals", "findim"):
            return expr
        return Dual(expr)
    if isinstance(expr, SumP):
        return _sump(conjugate(expr.p), _dual_of(expr.left), _dual_of(expr.right))
    if isinstance(expr, C0Sum):
        return LpSum(1, tuple(_dual_of(e) for e in expr.family))
    if isinstance(expr, LpSum):
        if expr.p == 1:
            return Dual(expr)
        return LpSum(conjugate(expr.p), tuple(_dual_of(e) for e in expr.family))
    if isinstance(expr, Dual):
        if structurally_reflexive(expr.inner):
            return expr.inner
        return Dual(expr)
    raise TypeError(f"not a space expression: {expr!r}")


def normalize(expr: SpaceExpr) -> SpaceExpr:
    """Eliminate rewritable duals and order the summands of binary sums."""
    if isinstance(expr, Atom):
        return expr
    if isinstance(expr, SumP):
        return _sump(expr.p, normalize(expr.left), normalize(expr.right))
    if isinstance(expr, C0Sum):
        return C0Sum(tuple(normalize(e) for e in expr.family))
    if isinstance(expr, LpSum):
        return LpSum(expr.p, tuple(normalize(e) for e in expr.family))
    if isinstance(expr, Dual):
        inner = expr.inner
        if isinstance(inner, Dual):
            base = normalize(inner.inner)
            if structurally_reflexive(base):
                return base
        return _dual_of(normalize(inner))
    raise TypeError(f"not a space expression: {expr!r}")
