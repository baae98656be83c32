"""Finite-dimensional normed spaces and the witness families used on them.

Every model evaluates its norm exactly (weighted l_p, recursive p-sums, sup
norms on a constrained grid, and the two-piece max renorming).  Norms and
subgradients are vectorized over the leading axis so the oracle can push a
whole batch of candidate points through one call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .dsl import Atom, C0Sum, LpSum, SpaceExpr, SumP, Dual

INF = math.inf
CONSTRAINT_TOL = 1e-9
UNIT_TOL = 1e-12


class ModelError(ValueError):
    """Malformed model or a vector that does not belong to it."""


class UntruncatableError(ValueError):
    """The expression has no finite-stage model."""


@dataclass(frozen=True)
class LpCoords:
    """Weighted l_p^n: ||v|| = ||w * v||_p."""

    p: float
    n: int
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.p >= 1:
            raise ModelError(f"p must be >= 1, got {self.p}")
        if self.n < 1:
            raise ModelError("dimension must be positive")
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) != self.n:
                raise ModelError("weights must have one entry per coordinate")
            if min(w) <= 0:
                raise ModelError("weights must be strictly positive")
            object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.n

    @cached_property
    def w(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.n)
        return np.asarray(self.weights, dtype=float)


@dataclass(frozen=True)
class PSum:
    """Finite l_p-sum of models: ||(v_1, ..., v_k)|| = ||(||v_1||, ..., ||v_k||)||_p."""

    p: float
    parts: tuple["FiniteModel", ...]

    def __post_init__(self):
        if not self.p >= 1:
            raise ModelError(f"p must be >= 1, got {self.p}")
        if not self.parts:
            raise ModelError("PSum needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def dim(self) -> int:
        return sum(part.dim for part in self.parts)

    @cached_property
    def offsets(self) -> list[int]:
        out = [0]
        for part in self.parts:
            out.append(out[-1] + part.dim)
        return out


@dataclass(frozen=True)
class GridCK:
    """Functions sampled on m grid nodes, sup norm, subject to A v = 0.

    ``constraints`` holds the rows of A (each of length m).
    """

    m: int
    constraints: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        if self.m < 1:
            raise ModelError("grid size must be positive")
        rows = tuple(tuple(float(a) for a in row) for row in self.constraints)
        for row in rows:
            if len(row) != self.m:
                raise ModelError("constraint rows must have length m")
        object.__setattr__(self, "constraints", rows)
        if self.basis.shape[1] == 0:
            raise ModelError("constraint system leaves only the zero vector")

    @property
    def dim(self) -> int:
        return self.m

    @cached_property
    def A(self) -> np.ndarray:
        return np.asarray(self.constraints, dtype=float).reshape(-1, self.m)

    @cached_property
    def basis(self) -> np.ndarray:
        return nullspace_basis(self.A, self.m)


@dataclass(frozen=True)
class RenormMax:
    """max(||P v||, ||v - P v||) for a coordinate projection P on an l_inf base."""

    base: LpCoords
    proj_coords: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.base, LpCoords):
            raise ModelError("RenormMax base must be an LpCoords model")
        coords = tuple(sorted(set(int(i) for i in self.proj_coords)))
        if any(i < 0 or i >= self.base.n for i in coords):
            raise ModelError("projection coordinates out of range")
        object.__setattr__(self, "proj_coords", coords)

    @property
    def dim(self) -> int:
        return self.base.n

    @cached_property
    def mask(self) -> np.ndarray:
        mask = np.zeros(self.base.n, dtype=bool)
        mask[list(self.proj_coords)] = True
        return mask


FiniteModel = Union[LpCoords, PSum, GridCK, RenormMax]


def nullspace_basis(A: np.ndarray, m: int) -> np.ndarray:
    """Basis of {v : A v = 0} by Gauss-Jordan elimination.

    Each basis vector has a 1 in one free coordinate and zeros in the
    others, so the pivot coordinates are determined exactly by the row
    reduction (no SVD round-off in the free coordinates).
    """
    R = np.array(A, dtype=float).reshape(-1, m)
    pivots: list[int] = []
    row = 0
    for col in range(m):
        if row >= R.shape[0]:
            break
        k = row + int(np.argmax(np.abs(R[row:, col])))
        if abs(R[k, col]) < 1e-12:
            continue
        R[[row, k]] = R[[k, row]]
        R[row] /= R[row, col]
        for other in range(R.shape[0]):
            if other != row and R[other, col] != 0.0:
                R[other] -= R[other, col] * R[row]
        pivots.append(col)
        row += 1
    free = [c for c in range(m) if c not in pivots]
    B = np.zeros((m, len(free)))
    for j, f in enumerate(free):
        B[f, j] = 1.0
        for i, pc in enumerate(pivots):
            B[pc, j] = -R[i, f]
    return B


# -- norms -------------------------------------------------------------------

def _pnorm_rows(Z: np.ndarray, p: float) -> np.ndarray:
    A = np.abs(Z)
    if p == 1:
        return A.sum(axis=-1)
    if p == INF:
        return A.max(axis=-1)
    with np.errstate(over="ignore", under="ignore"):
        total = ((A * A) if p == 2 else (A ** p)).sum(axis=-1)
    if np.all(np.isfinite(total)) and np.all((total > 1e-250) | (A.max(axis=-1) == 0)):
        return np.sqrt(total) if p == 2 else total ** (1.0 / p)
    scale = A.max(axis=-1, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    return safe[..., 0] * ((A / safe) ** p).sum(axis=-1) ** (1.0 / p)


def _pnorm_grad_rows(Z: np.ndarray, p: float) -> np.ndarray:
    if p == 1:
        return np.sign(Z)
    if p == INF:
        G = np.zeros_like(Z)
        k = np.argmax(np.abs(Z), axis=-1)
        idx = np.arange(Z.shape[0])
        G[idx, k] = np.sign(Z[idx, k])
        return G
    nrm = _pnorm_rows(Z, p)[:, None]
    safe = np.where(nrm > 0, nrm, 1.0)
    G = np.sign(Z) * (np.abs(Z) / safe) ** (p - 1)
    return np.where(nrm > 0, G, 0.0)


def norm_rows(model: FiniteModel, V: np.ndarray) -> np.ndarray:
    """Norms of the rows of V (shape (batch, dim)); no constraint check."""
    if isinstance(model, LpCoords):
        return _pnorm_rows(V * model.w, model.p)
    if isinstance(model, PSum):
        off = model.offsets
        S = np.stack([norm_rows(part, V[:, off[j]:off[j + 1]])
                      for j, part in enumerate(model.parts)], axis=-1)
        return _pnorm_rows(S, model.p)
    if isinstance(model, GridCK):
        return np.abs(V).max(axis=-1)
    if isinstance(model, RenormMax):
        inside = norm_rows(model.base, np.where(model.mask, V, 0.0))
        outside = norm_rows(model.base, np.where(model.mask, 0.0, V))
        return np.maximum(inside, outside)
    raise ModelError(f"unknown model {model!r}")


def grad_rows(model: FiniteModel, V: np.ndarray) -> np.ndarray:
    """A subgradient of the norm at each row of V.

    Ties between equal pieces go to the lowest index.
    """
    if isinstance(model, LpCoords):
        return _pnorm_grad_rows(V * model.w, model.p) * model.w
    if isinstance(model, PSum):
        off = model.offsets
        S = np.stack([norm_rows(part, V[:, off[j]:off[j + 1]])
                      for j, part in enumerate(model.parts)], axis=-1)
        outer = _pnorm_grad_rows(S, model.p)
        G = np.empty_like(V)
        for j, part in enumerate(model.parts):
            block = V[:, off[j]:off[j + 1]]
            G[:, off[j]:off[j + 1]] = outer[:, j:j + 1] * grad_rows(part, block)
        return G
    if isinstance(model, GridCK):
        return _pnorm_grad_rows(V, INF)
    if isinstance(model, RenormMax):
        Vin = np.where(model.mask, V, 0.0)
        Vout = np.where(model.mask, 0.0, V)
        use_in = norm_rows(model.base, Vin) >= norm_rows(model.base, Vout)
        Gin = np.where(model.mask, grad_rows(model.base, Vin), 0.0)
        Gout = np.where(model.mask, 0.0, grad_rows(model.base, Vout))
        return np.where(use_in[:, None], Gin, Gout)
    raise ModelError(f"unknown model {model!r}")


def check_vector(model: FiniteModel, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != model.dim:
        raise ModelError(
            f"dimension mismatch: model has dimension {model.dim}, "
            f"vector has shape {v.shape}")
    if isinstance(model, GridCK) and model.A.size:
        resid = np.abs(model.A @ v).max()
        if resid > CONSTRAINT_TOL * max(1.0, np.abs(v).max()):
            raise ModelError(f"vector violates grid constraints (residual {resid:.3g})")
    return v


def norm(model: FiniteModel, v) -> float:
    """Exact norm of a single coordinate vector."""
    v = check_vector(model, v)
    return float(norm_rows(model, v[None, :])[0])


def random_unit_vectors(model: FiniteModel, count: int,
                        rng: np.random.Generator) -> np.ndarray:
    """Gaussian directions scaled onto the unit sphere (rows)."""
    if isinstance(model, GridCK):
        V = rng.standard_normal((count, model.basis.shape[1])) @ model.basis.T
    else:
        V = rng.standard_normal((count, model.dim))
    return V / norm_rows(model, V)[:, None]


def random_ball_vectors(model: FiniteModel, count: int,
                        rng: np.random.Generator) -> np.ndarray:
    U = random_unit_vectors(model, count, rng)
    radii = rng.random(count) ** (1.0 / model.dim)
    return U * radii[:, None]


# -- serialization -----------------------------------------------------------

def _p_to_json(p: float):
    return "inf" if p == INF else p


def _p_from_json(p) -> float:
    return INF if p in ("inf", "Infinity") else float(p)


def model_to_dict(model: FiniteModel) -> dict:
    if isinstance(model, LpCoords):
        return {"kind": "lp", "p": _p_to_json(model.p), "n": model.n,
                "weights": list(model.weights) if model.weights else None}
    if isinstance(model, PSum):
        return {"kind": "psum", "p": _p_to_json(model.p),
                "parts": [model_to_dict(part) for part in model.parts]}
    if isinstance(model, GridCK):
        return {"kind": "grid", "m": model.m,
                "constraints": [list(row) for row in model.constraints]}
    if isinstance(model, RenormMax):
        return {"kind": "renorm_max", "base": model_to_dict(model.base),
                "proj_coords": list(model.proj_coords)}
    raise ModelError(f"unknown model {model!r}")


def model_from_dict(d: dict) -> FiniteModel:
    kind = d.get("kind")
    if kind == "lp":
        w = d.get("weights")
        return LpCoords(_p_from_json(d["p"]), int(d["n"]), tuple(w) if w else None)
    if kind == "psum":
        return PSum(_p_from_json(d["p"]), tuple(model_from_dict(x) for x in d["parts"]))
    if kind == "grid":
        return GridCK(int(d["m"]), tuple(tuple(r) for r in d.get("constraints", ())))
    if kind == "renorm_max":
        return RenormMax(model_from_dict(d["base"]), tuple(d["proj_coords"]))
    raise ModelError(f"unknown model kind {kind!r}")


# -- truncation --------------------------------------------------------------

def xr_grid(r: float, m: int) -> GridCK:
    row = [0.0] * m
    row[0] += 1.0
    row[m - 1] -= r
    return GridCK(m, (tuple(row),))


def truncate(expr: SpaceExpr, n: int) -> FiniteModel:
    """Finite-stage model of ``expr`` with n coordinates per atom."""
    if n < 1:
        raise ModelError("truncation size must be positive")
    if isinstance(expr, Atom):
        if expr.kind == "lp":
            return LpCoords(expr.param, n)
        if expr.kind == "c0":
            return LpCoords(INF, n)
        if expr.kind == "lp01":
            p = expr.param
            w = 1.0 if p == INF else (1.0 / n) ** (1.0 / p)
            return LpCoords(p, n, tuple([w] * n))
        if expr.kind == "xr":
            return xr_grid(expr.param, n)
        raise UntruncatableError(f"no finite model for atom {expr.kind!r}")
    if isinstance(expr, SumP):
        return PSum(expr.p, (truncate(expr.left, n), truncate(expr.right, n)))
    if isinstance(expr, C0Sum):
        fam = expr.family
        return PSum(INF, tuple(truncate(fam[i % len(fam)], n) for i in range(n)))
    if isinstance(expr, LpSum):
        fam = expr.family
        return PSum(expr.p, tuple(truncate(fam[i % len(fam)], n) for i in range(n)))
    if isinstance(expr, Dual):
        raise UntruncatableError("dual spaces have no finite model here")
    raise UntruncatableError(f"cannot truncate {expr!r}")


# -- witness families --------------------------------------------------------

@dataclass(frozen=True)
class WitnessFamily:
    model: FiniteModel
    vectors: np.ndarray = field(compare=False)
    construction: str
    citation: str

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        if V.shape[0] == 0:
            raise ModelError("witness family must be nonempty")
        if V.shape[1] != self.model.dim:
            raise ModelError("witness vectors do not match the model dimension")
        for v in V:
            check_vector(self.model, v)
        norms = norm_rows(self.model, V)
        bad = np.abs(norms - 1.0) > UNIT_TOL
        if bad.any():
            raise ModelError(f"witness {int(np.argmax(bad))} has norm "
                             f"{norms[bad][0]!r}, expected 1")
        V.setflags(write=False)
        object.__setattr__(self, "vectors", V)

    def __len__(self):
        return self.vectors.shape[0]


def basis_witnesses(model: LpCoords, k: int) -> WitnessFamily:
    """First k coordinate vectors, rescaled to unit norm under the weights."""
    if not isinstance(model, LpCoords):
        raise ModelError("basis witnesses need an LpCoords model")
    if not 1 <= k <= model.n:
        raise ModelError(f"k={k} outside 1..{model.n}")
    V = np.zeros((k, model.n))
    V[np.arange(k), np.arange(k)] = 1.0 / model.w[:k]
    return WitnessFamily(model, V, f"basis e_1..e_{k}",
                         "disjoint-block witnesses (Whitley; Haller)")


def pm_theta_witnesses(p: float, thetas: Sequence[float],
                       block_dim: int) -> WitnessFamily:
    """(+-a e_1, +-b e_1) in l_1 (+)_p l_1 with a = cos^(2/p), b = sin^(2/p)."""
    thetas = list(thetas)
    if not thetas:
        raise ModelError("thetas must be nonempty")
    if not 1 <= p < INF:
        raise ModelError("p must lie in [1, inf)")
    if block_dim < 1:
        raise ModelError("block_dim must be positive")
    model = PSum(p, (LpCoords(1, block_dim), LpCoords(1, block_dim)))
    rows = []
    for theta in thetas:
        if not 0 <= theta <= math.pi / 2:
            raise ModelError(f"theta {theta} outside [0, pi/2]")
        a = max(math.cos(theta), 0.0) ** (2.0 / p)
        b = max(math.sin(theta), 0.0) ** (2.0 / p)
        for sa in (1.0, -1.0):
            for sb in (1.0, -1.0):
                v = np.zeros(2 * block_dim)
                v[0] = sa * a
                v[block_dim] = sb * b
                rows.append(v)
    return WitnessFamily(model, np.array(rows), "pm-theta",
                         "l1 (+)_p l1 thinness net")


def theta_net(p: float, count: int) -> list[float]:
    """theta_i = arccos(xi_i^(p/2)) over an equispaced xi-net of [0, 1]."""
    xs = np.linspace(0.0, 1.0, count)
    return [math.acos(min(1.0, x ** (p / 2.0))) for x in xs]


def xr_witnesses(r: float, m: int) -> WitnessFamily:
    """f_1(x) = (1 - x) + x / r and f_2 = -f_1 on an m-node grid of [0, 1]."""
    if not r > 1:
        raise ModelError("r must be > 1")
    if m < 2:
        raise ModelError("grid needs at least two nodes")
    x = np.linspace(0.0, 1.0, m)
    f1 = (1.0 - x) + x / r
    f1[0], f1[-1] = 1.0, 1.0 / r
    return WitnessFamily(xr_grid(r, m), np.stack([f1, -f1]), "xr-pair",
                         "X_r thinness witnesses")


def lp01_step_witnesses(p: float, n: int, m: int) -> WitnessFamily:
    """f_i = n^(1/p) chi_[i/n, (i+1)/n] on an m-cell uniform grid of [0, 1]."""
    if m % n:
        raise ModelError("grid size must be a multiple of the number of steps")
    w = (1.0 / m) ** (1.0 / p)
    model = LpCoords(p, m, tuple([w] * m))
    cell = m // n
    V = np.zeros((n, m))
    for i in range(n):
        V[i, i * cell:(i + 1) * cell] = n ** (1.0 / p)
    return WitnessFamily(model, V, f"step functions n={n}",
                         "Haller step witnesses in L_p[0,1]")
