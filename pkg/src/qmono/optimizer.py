"""Minimization over single-qubit projective measurement bases.

A basis is two Bloch angles (t, p) with |v> = cos(t/2)|0> + e^{ip} sin(t/2)|1>.
The search is a coarse grid scan followed by Nelder-Mead refinement from the
best few grid points. Objectives receive ``(t, p)`` and, when
``vectorized=True``, must broadcast over numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, asdict
from math import pi

import numpy as np
from scipy.optimize import minimize

TWO_PI = 2 * pi


def normalize_angles(t, p):
    """Map arbitrary angles into t in [0, pi], p in [0, 2pi) (same projector)."""
    t = float(np.mod(t, TWO_PI))
    p = float(p)
    if t > pi:
        t = TWO_PI - t
        p += pi
    p = float(np.mod(p, TWO_PI))
    if p >= TWO_PI:
        p = 0.0
    return t, p


@dataclass(frozen=True)
class MeasurementBasis:
    t: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.t <= pi and 0.0 <= self.p < TWO_PI):
            t, p = normalize_angles(self.t, self.p)
            object.__setattr__(self, "t", t)
            object.__setattr__(self, "p", p)

    def vectors(self):
        """Orthonormal pair (|v0>, |v1>) defining the projectors."""
        c, s = np.cos(self.t / 2), np.sin(self.t / 2)
        e = np.exp(1j * self.p)
        return np.array([c, e * s]), np.array([-np.conj(e) * s, c])

    def projectors(self):
        v0, v1 = self.vectors()
        return np.outer(v0, v0.conj()), np.outer(v1, v1.conj())

    def bloch(self):
        return np.array([
            np.sin(self.t) * np.cos(self.p),
            np.sin(self.t) * np.sin(self.p),
            np.cos(self.t),
        ])


@dataclass(frozen=True)
class OptimizerConfig:
    grid_t: int = 24
    grid_p: int = 48
    refine_tol: float = 1e-6
    max_iters: int = 500
    n_starts: int = 3

    def __post_init__(self):
        if self.grid_t < 8 or self.grid_p < 16:
            raise ValueError("grid must be at least 8 x 16")
        if not 0 < self.refine_tol <= 1e-4:
            raise ValueError("refine_tol must lie in (0, 1e-4]")
        if self.max_iters < 1 or self.n_starts < 1:
            raise ValueError("max_iters and n_starts must be positive")

    def as_dict(self):
        return asdict(self)


DEFAULT_CONFIG = OptimizerConfig()


@dataclass(frozen=True)
class OptResult:
    value: float
    arg: MeasurementBasis
    evals: int
    converged: bool = True


def basis_grid(cfg: OptimizerConfig):
    t = np.linspace(0.0, pi, cfg.grid_t)
    p = np.arange(cfg.grid_p) * (TWO_PI / cfg.grid_p)
    return np.meshgrid(t, p, indexing="ij")


def minimize_over_basis(obj, cfg: OptimizerConfig = DEFAULT_CONFIG, vectorized=True,
                        scalar=None) -> OptResult:
    """Grid scan plus Nelder-Mead refinement from the ``cfg.n_starts`` best points.

    `scalar`, if given, is an equivalent objective taking plain floats, used
    for the refinement steps where per-call overhead dominates.
    """
    T, P = basis_grid(cfg)
    if vectorized:
        vals = np.broadcast_to(np.asarray(obj(T, P), dtype=float), T.shape).ravel()
    else:
        vals = np.array([obj(t, p) for t, p in zip(T.ravel(), P.ravel())], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("objective is not finite on the basis grid")
    evals = vals.size
    order = np.argsort(vals, kind="stable")[: cfg.n_starts]
    best_val = float(vals[order[0]])
    best_x = (T.ravel()[order[0]], P.ravel()[order[0]])

    dt = pi / (cfg.grid_t - 1)
    dp = TWO_PI / cfg.grid_p

    point = scalar or obj

    def f(x):
        return float(point(x[0], x[1]))

    converged = True
    for i in order:
        x0 = np.array([T.ravel()[i], P.ravel()[i]])
        simplex = np.array([x0, x0 + [0.5 * dt, 0.0], x0 + [0.0, 0.5 * dp]])
        res = minimize(
            f, x0, method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": cfg.refine_tol,
                "fatol": cfg.refine_tol * 1e-3,
                "maxiter": cfg.max_iters,
                "maxfev": 4 * cfg.max_iters,
            },
        )
        evals += res.nfev
        converged = converged and bool(res.success)
        if res.fun < best_val:
            best_val = float(res.fun)
            best_x = (res.x[0], res.x[1])

    return OptResult(best_val, MeasurementBasis(*normalize_angles(*best_x)), evals, converged)
