"""Numerical min-max oracles over the unit sphere of a finite model.

The three inner problems behind the index definitions, for a fixed finite
witness set (x_i):

* ``eval_inf_max``  -- inf over unit x of max_i ||x_i - x||   (thinness)
* ``eval_sup_min``  -- sup over unit x of min_i ||x_i - x||   (thickness)
* ``eval_mu``       -- inf or sup of the average distance     (Yost indices)

Each run is a multistart local search.  A projected-subgradient phase with
geometric step decay and radial retraction screens the starts; the best
few are then polished by L-BFGS on a smoothed objective (log-sum-exp over
the witnesses, smoothed absolute values inside the norms) with the
smoothing temperature driven down geometrically.  Every reported value is
the exact objective at an exact unit vector, so an inf result is always an
upper estimate of the true infimum and a sup result a lower estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp, softmax

from .models import (FiniteModel, GridCK, LpCoords, ModelError, PSum, RenormMax,
                     WitnessFamily, grad_rows, model_to_dict, norm_rows,
                     random_ball_vectors, random_unit_vectors, check_vector)

INF = math.inf
SPHERE_TOL = 1e-9
AGREE_TOL = 1e-6
_CHUNK = 4_000_000

Objective = Literal["max", "min", "mean"]


@dataclass(frozen=True)
class OptConfig:
    multistarts: int = 16
    max_iters: int = 2000
    step0: float = 0.1
    tol: float = 1e-9
    seed: int = 0
    decay: float = 0.99
    polish_starts: int = 4

    def __post_init__(self):
        if self.multistarts < 1 or self.max_iters < 1 or self.polish_starts < 1:
            raise ValueError("multistarts, max_iters and polish_starts must be positive")
        if not (self.step0 > 0 and self.tol > 0):
            raise ValueError("step0 and tol must be positive")
        if not self.tol < self.step0:
            raise ValueError("tol must be smaller than step0")
        if not 0 < self.decay < 1:
            raise ValueError("decay must lie in (0, 1)")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass
class OracleResult:
    value: float
    argpoint: np.ndarray
    status: Literal["converged", "iteration_cap"]
    starts_agreeing: int
    starts: int = 0

    def to_dict(self) -> dict:
        return {"value": self.value, "argpoint": self.argpoint.tolist(),
                "status": self.status, "starts_agreeing": self.starts_agreeing,
                "starts": self.starts}


# -- smoothed norms ----------------------------------------------------------

def _smooth_pnorm(Z: np.ndarray, p: float, delta: float):
    if p == INF:
        A = np.concatenate([Z, -Z], axis=-1) / delta
        val = delta * logsumexp(A, axis=-1)
        w = softmax(A, axis=-1)
        n = Z.shape[-1]
        return val, w[..., :n] - w[..., n:]
    A = np.sqrt(Z * Z + delta * delta)
    if p == 1:
        return A.sum(axis=-1), Z / A
    val = (A ** p).sum(axis=-1) ** (1.0 / p)
    grad = (A / val[..., None]) ** (p - 1) * Z / A
    return val, grad


def _smooth_norm(model: FiniteModel, V: np.ndarray, delta: float):
    """Smooth upper approximation of the norm and its gradient (row-wise)."""
    if isinstance(model, LpCoords):
        val, g = _smooth_pnorm(V * model.w, model.p, delta)
        return val, g * model.w
    if isinstance(model, PSum):
        off = model.offsets
        parts = [_smooth_norm(part, V[..., off[j]:off[j + 1]], delta)
                 for j, part in enumerate(model.parts)]
        S = np.stack([v for v, _ in parts], axis=-1)
        val, outer = _smooth_pnorm(S, model.p, delta)
        G = np.concatenate([outer[..., j:j + 1] * parts[j][1]
                            for j in range(len(parts))], axis=-1)
        return val, G
    if isinstance(model, GridCK):
        return _smooth_pnorm(V, INF, delta)
    if isinstance(model, RenormMax):
        vin, gin = _smooth_norm(model.base, np.where(model.mask, V, 0.0), delta)
        vout, gout = _smooth_norm(model.base, np.where(model.mask, 0.0, V), delta)
        pair = np.stack([vin, vout], axis=-1) / delta
        val = delta * logsumexp(pair, axis=-1)
        w = softmax(pair, axis=-1)
        G = (w[..., :1] * np.where(model.mask, gin, 0.0)
             + w[..., 1:] * np.where(model.mask, 0.0, gout))
        return val, G
    raise ModelError(f"unknown model {model!r}")


# -- the search --------------------------------------------------------------

class _Problem:
    """Witness distances as a function of parameters y, with x = B y on the sphere."""

    def __init__(self, model: FiniteModel, W: np.ndarray, objective: Objective,
                 sense: int):
        self.model = model
        self.W = W
        self.objective = objective
        self.sense = sense  # +1 minimize, -1 maximize
        self.B = model.basis if isinstance(model, GridCK) else None

    def to_x(self, Y: np.ndarray) -> np.ndarray:
        return Y if self.B is None else Y @ self.B.T

    def to_y(self, X: np.ndarray) -> np.ndarray:
        if self.B is None:
            return X
        return np.linalg.lstsq(self.B, X.T, rcond=None)[0].T

    def retract(self, Y: np.ndarray, fallback: np.ndarray | None = None) -> np.ndarray:
        """Scale rows onto the unit sphere; zero rows revert to ``fallback``."""
        nrm = norm_rows(self.model, self.to_x(Y))
        dead = ~(nrm > 0)
        if dead.any():
            if fallback is None:
                raise ModelError("cannot retract the zero vector onto the sphere")
            Y = np.where(dead[:, None], fallback, Y)
            nrm = np.where(dead, norm_rows(self.model, self.to_x(fallback)), nrm)
        return Y / nrm[:, None]

    def distances(self, X: np.ndarray) -> np.ndarray:
        k, d = self.W.shape
        out = np.empty((X.shape[0], k))
        step = max(1, _CHUNK // max(1, k * d))
        for s in range(0, X.shape[0], step):
            Xs = X[s:s + step]
            D = (self.W[None] - Xs[:, None]).reshape(-1, d)
            out[s:s + step] = norm_rows(self.model, D).reshape(len(Xs), k)
        return out

    def reduce(self, dist: np.ndarray) -> np.ndarray:
        if self.objective == "max":
            return dist.max(axis=1)
        if self.objective == "min":
            return dist.min(axis=1)
        return dist.mean(axis=1)

    def values(self, X: np.ndarray) -> np.ndarray:
        return self.reduce(self.distances(X))

    def subgradient(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Objective values and a subgradient w.r.t. x, one row per point."""
        k, d = self.W.shape
        dist = self.distances(X)
        vals = self.reduce(dist)
        if self.objective == "mean":
            G = np.zeros_like(X)
            for i in range(k):
                G -= grad_rows(self.model, self.W[i] - X)
            return vals, G / k
        pick = dist.argmax(axis=1) if self.objective == "max" else dist.argmin(axis=1)
        return vals, -grad_rows(self.model, self.W[pick] - X)

    def smooth(self, y: np.ndarray, tau: float) -> tuple[float, np.ndarray]:
        """Smoothed sense-adjusted objective at y (not necessarily unit) and gradient."""
        delta = 1e-2 * tau
        x0 = y if self.B is None else self.B @ y
        N, gN = _smooth_norm(self.model, x0[None], delta)
        N, gN = N[0], gN[0]
        x = x0 / N
        dist, gd = _smooth_norm(self.model, self.W - x[None], delta)
        if self.objective == "mean":
            F = dist.mean()
            wts = np.full(len(dist), 1.0 / len(dist))
        else:
            a = (dist if self.objective == "max" else -dist) / tau
            sgn = 1.0 if self.objective == "max" else -1.0
            F = sgn * tau * logsumexp(a)
            wts = softmax(a)
        gx = -(wts[:, None] * gd).sum(axis=0)
        g0 = (gx - gN * (x @ gx)) / N
        gy = g0 if self.B is None else self.B.T @ g0
        return self.sense * F, self.sense * gy


def _subgradient_phase(prob: _Problem, Y: np.ndarray, cfg: OptConfig):
    """Projected subgradient with geometric steps; returns best points and values."""
    Y = prob.retract(Y)
    best_val = np.full(Y.shape[0], np.inf * prob.sense)
    best_Y = Y.copy()
    eta = cfg.step0
    it = 0
    coarse = max(cfg.tol, 1e-2 * cfg.step0)
    while it < cfg.max_iters and eta >= coarse:
        X = prob.to_x(Y)
        vals, G = prob.subgradient(X)
        better = prob.sense * (vals - best_val) < 0
        best_val = np.where(better, vals, best_val)
        best_Y[better] = Y[better]
        if prob.B is not None:
            G = G @ prob.B
        gn = np.linalg.norm(G, axis=1, keepdims=True)
        gn[gn == 0] = 1.0
        yn = np.linalg.norm(Y, axis=1, keepdims=True)
        Y = prob.retract(Y - prob.sense * eta * yn * G / gn, fallback=Y)
        eta *= cfg.decay
        it += 1
    vals = prob.values(prob.to_x(Y))
    better = prob.sense * (vals - best_val) < 0
    best_val = np.where(better, vals, best_val)
    best_Y[better] = Y[better]
    return best_Y, best_val


def _polish(prob: _Problem, y: np.ndarray, cfg: OptConfig):
    """Temperature continuation on the smoothed objective; tracks exact values."""
    best_y = prob.retract(y[None])[0]
    best_val = float(prob.values(prob.to_x(best_y[None]))[0])
    converged = False
    final_tau = max(cfg.tol, 1e-8)
    n_stages = max(1, int(round(math.log10(0.1 / final_tau))) + 1)
    taus = np.geomspace(0.1, final_tau, n_stages)
    for tau in taus:
        res = minimize(prob.smooth, y, args=(float(tau),), jac=True, method="L-BFGS-B",
                       options={"maxiter": cfg.max_iters, "gtol": 1e-13, "ftol": 1e-15})
        y = prob.retract(res.x[None], fallback=y[None])[0]
        val = float(prob.values(prob.to_x(y[None]))[0])
        if prob.sense * (val - best_val) < 0:
            best_val, best_y = val, y
        converged = res.nit < cfg.max_iters
        y = y / np.linalg.norm(y)
    return best_y, best_val, converged


def _optimize(model: FiniteModel, w: WitnessFamily, objective: Objective, sense: int,
              cfg: OptConfig, candidates=None) -> OracleResult:
    if w.model != model:
        raise ModelError("witness family belongs to a different model")
    W = np.asarray(w.vectors, dtype=float)
    if W.shape[1] != model.dim:
        raise ModelError("dimension mismatch between witnesses and model")
    prob = _Problem(model, W, objective, sense)
    rng = np.random.default_rng(cfg.seed)

    random_starts = random_unit_vectors(model, cfg.multistarts, rng)
    warm = np.vstack([W, -W])
    warm_vals = prob.values(warm)
    order = np.argsort(sense * warm_vals, kind="stable")[:cfg.multistarts]
    starts = np.vstack([random_starts, warm[order]])
    extra = np.zeros((0, model.dim))
    if candidates is not None:
        extra = np.atleast_2d(np.asarray(candidates, dtype=float))
        for c in extra:
            check_vector(model, c)
            if abs(norm_rows(model, c[None])[0] - 1.0) > SPHERE_TOL:
                raise ModelError("candidate points must be unit vectors")
        starts = np.vstack([starts, extra])

    Y, vals = _subgradient_phase(prob, prob.to_y(starts), cfg)
    ranked = np.argsort(sense * vals, kind="stable")
    chosen = ranked[:cfg.polish_starts]

    finals_Y = [Y[i] for i in range(len(Y))]
    finals_val = list(vals)
    converged_flags = {}
    for i in chosen:
        y, v, conv = _polish(prob, Y[i], cfg)
        converged_flags[int(i)] = conv
        if sense * (v - finals_val[i]) < 0:
            finals_Y[i], finals_val[i] = y, v

    finals_val = np.asarray(finals_val)
    # Exact candidates always compete at their own value.
    X_all = prob.to_x(np.vstack(finals_Y))
    if len(extra):
        X_all = np.vstack([X_all, extra])
        finals_val = np.concatenate([finals_val, prob.values(extra)])
    best = int(np.argsort(sense * finals_val, kind="stable")[0])
    x = X_all[best]
    x = x / norm_rows(model, x[None])[0]
    value = float(prob.values(x[None])[0])
    agree = int(np.sum(np.abs(finals_val - value) <= AGREE_TOL))
    status = "converged" if converged_flags.get(best, True) else "iteration_cap"
    return OracleResult(value, x, status, agree, starts=len(finals_val))


def eval_inf_max(model: FiniteModel, w: WitnessFamily, cfg: OptConfig = OptConfig(),
                 candidates=None) -> OracleResult:
    """Upper estimate of inf over the unit sphere of max_i ||x_i - x||."""
    return _optimize(model, w, "max", +1, cfg, candidates)


def eval_sup_min(model: FiniteModel, centers: WitnessFamily,
                 cfg: OptConfig = OptConfig(), candidates=None) -> OracleResult:
    """Lower estimate of sup over the unit sphere of min_i ||x_i - x||."""
    return _optimize(model, centers, "min", -1, cfg, candidates)


def eval_mu(model: FiniteModel, w: WitnessFamily, mode: Literal["inf", "sup"],
            cfg: OptConfig = OptConfig(), candidates=None) -> OracleResult:
    """Inf or sup over the unit sphere of the average witness distance."""
    if mode not in ("inf", "sup"):
        raise ValueError("mode must be 'inf' or 'sup'")
    return _optimize(model, w, "mean", +1 if mode == "inf" else -1, cfg, candidates)


def objective_at(model: FiniteModel, w: WitnessFamily, x, objective: Objective = "max") -> float:
    """Exact max/min/mean witness distance at a single point."""
    x = check_vector(model, x)
    prob = _Problem(model, np.asarray(w.vectors, dtype=float), objective, 1)
    return float(prob.values(x[None])[0])


# -- covering ----------------------------------------------------------------

@dataclass
class CoverResult:
    covered: bool
    worst_value: float
    worst_point: np.ndarray
    samples: int = 0

    def to_dict(self) -> dict:
        return {"covered": self.covered, "worst_value": self.worst_value,
                "worst_point": self.worst_point.tolist(), "samples": self.samples}


def _ball_ascent(prob: _Problem, X: np.ndarray, cfg: OptConfig) -> tuple[np.ndarray, np.ndarray]:
    """Subgradient ascent on min-distance inside the closed unit ball."""
    best_val = prob.values(X)
    best_X = X.copy()
    eta = cfg.step0
    it = 0
    while it < cfg.max_iters and eta >= max(cfg.tol, 1e-4 * cfg.step0):
        vals, G = prob.subgradient(X)
        better = vals > best_val
        best_val = np.where(better, vals, best_val)
        best_X[better] = X[better]
        if prob.B is not None:
            G = (G @ prob.B) @ prob.B.T
        gn = np.linalg.norm(G, axis=1, keepdims=True)
        gn[gn == 0] = 1.0
        X = X + eta * G / gn
        nrm = norm_rows(prob.model, X)
        X = np.where((nrm > 1)[:, None], X / np.maximum(nrm, 1e-300)[:, None], X)
        eta *= cfg.decay
        it += 1
    vals = prob.values(X)
    better = vals > best_val
    best_val = np.where(better, vals, best_val)
    best_X[better] = X[better]
    return best_X, best_val


def verify_cover(model: FiniteModel, centers: WitnessFamily, radius: float,
                 samples: int, cfg: OptConfig = OptConfig(),
                 domain: Literal["sphere", "ball", "both"] = "sphere") -> CoverResult:
    """Sampled check that balls of ``radius`` around the centers cover S_X (or B_X).

    Random points are scored by their distance to the nearest center; the
    worst ``multistarts`` of them are then pushed further by local ascent.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    if centers.model != model:
        raise ModelError("centers belong to a different model")
    rng = np.random.default_rng(cfg.seed)
    prob = _Problem(model, np.asarray(centers.vectors, dtype=float), "min", -1)
    pools = []
    if domain in ("sphere", "both"):
        pools.append(("sphere", random_unit_vectors(model, samples, rng)))
    if domain in ("ball", "both"):
        pools.append(("ball", random_ball_vectors(model, samples, rng)))
    worst_val, worst_x = -np.inf, None
    for kind, X in pools:
        vals = prob.values(X)
        top = np.argsort(-vals, kind="stable")[:cfg.multistarts]
        if kind == "sphere":
            Y, v = _subgradient_phase(prob, prob.to_y(X[top]), cfg)
            Xs = prob.to_x(Y)
        else:
            Xs, v = _ball_ascent(prob, X[top], cfg)
        Xs = np.vstack([Xs, X[top]])
        v = np.concatenate([v, vals[top]])
        j = int(np.argmax(v))
        if v[j] > worst_val:
            worst_val, worst_x = float(v[j]), Xs[j]
    return CoverResult(bool(worst_val <= radius + 1e-9), worst_val, worst_x,
                       samples * len(pools))


# -- closed forms ------------------------------------------------------------

def f_theta_xi(p: float, theta: float, xi: float) -> float:
    """((cos t)^(2/p) + xi)^p + ((sin t)^(2/p) + (1 - xi^p)^(1/p))^p.

    Evaluated with 40 significant digits and rounded once, so the identity
    f(arccos(xi^(p/2)), xi) = 2^p survives to double precision even for
    large p (the identity point is a maximum in theta, so the rounding of
    theta only enters at second order).
    """
    import mpmath

    if not (p >= 1 and math.isfinite(p)):
        raise ValueError("p must be a finite real >= 1")
    if not 0 <= theta <= math.pi / 2:
        raise ValueError("theta must lie in [0, pi/2]")
    if not 0 <= xi <= 1:
        raise ValueError("xi must lie in [0, 1]")
    with mpmath.workdps(40):
        P, T, X = mpmath.mpf(p), mpmath.mpf(theta), mpmath.mpf(xi)
        c = max(mpmath.cos(T), mpmath.mpf(0))
        s = max(mpmath.sin(T), mpmath.mpf(0))
        tail = max(1 - X ** P, mpmath.mpf(0)) ** (1 / P)
        val = (c ** (2 / P) + X) ** P + (s ** (2 / P) + tail) ** P
        return float(val)


def identity_theta(p: float, xi: float) -> float:
    return math.acos(min(1.0, xi ** (p / 2.0)))


@dataclass
class RenormDemo:
    covered: bool
    report: str
    cover: CoverResult = field(repr=False)
    inf_max: OracleResult = field(repr=False)
    fresh_value: float = 0.0


def renorm_cover_demo(n: int, proj_size: int, cfg: OptConfig = OptConfig(),
                      samples: int = 20_000) -> RenormDemo:
    """Finite-stage two-ball covering for the max renorming, plus a thinness probe.

    The model is l_inf^n renormed by max(||Px||, ||x - Px||) with P the
    projection onto the first ``proj_size`` coordinates.  The covering check
    samples the unit ball; the thinness probe runs the inf-max oracle for the
    basis witnesses of the projected block and also evaluates the fresh
    coordinate e_n outside their supports.
    """
    from .models import basis_witnesses

    if not 1 <= proj_size < n:
        raise ValueError("need 1 <= proj_size < n")
    model = RenormMax(LpCoords(INF, n), tuple(range(proj_size)))
    e1 = np.zeros(n)
    e1[0] = 1.0
    centers = WitnessFamily(model, np.stack([e1, -e1]), "pm-e1", "two-ball covering")
    cover = verify_cover(model, centers, 1.0, samples, cfg, domain="both")

    witnesses = basis_witnesses(LpCoords(INF, n), proj_size).vectors
    fam = WitnessFamily(model, witnesses, f"basis e_1..e_{proj_size}",
                        "projected-block witnesses")
    fresh = np.zeros(n)
    fresh[-1] = 1.0
    fresh_value = objective_at(model, fam, fresh, "max")
    probe = eval_inf_max(model, fam, cfg, candidates=fresh[None])
    ok = cover.covered and probe.value <= 1 + 1e-6
    report = "\n".join([
        f"model: l_inf^{n} with max renorming over coordinates 1..{proj_size}",
        f"two-ball cover of the unit ball by B(+-e1, 1): "
        f"worst distance {cover.worst_value:.12g} -> {'covered' if cover.covered else 'NOT covered'}",
        f"inf-max over basis witnesses of the projected block: {probe.value:.12g} "
        f"(fresh coordinate gives {fresh_value:.12g})",
    ])
    return RenormDemo(ok, report, cover, probe, fresh_value)


def result_record(model: FiniteModel, construction: str, cfg: OptConfig,
                  result: OracleResult, bracket=None) -> dict:
    """JSON-ready experiment record."""
    return {"model": model_to_dict(model), "witness_construction": construction,
            "cfg": asdict(cfg), "value": result.value,
            "bracket": list(bracket) if bracket is not None else None,
            "status": result.status}
