"""Box-constrained derivative-free maximization via multistart Nelder-Mead.

The objectives here are smooth, cheap, low-dimensional and often maximized
on the boundary of the unit box, so the start set is the {0, 1/2, 1}
corner/center lattice (replaced by a seeded Latin hypercube once the
lattice outgrows the start cap). Candidate points are clamped into the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["BoxDomain", "OptResult", "OptimizerConfig", "maximize"]

# Reflection / expansion / contraction / shrink coefficients.
_ALPHA, _GAMMA, _BETA, _DELTA = 1.0, 2.0, 0.5, 0.5


@dataclass(frozen=True)
class BoxDomain:
    d: int
    lower: tuple
    upper: tuple

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if len(self.lower) != self.d or len(self.upper) != self.d:
            raise ValueError("bounds length does not match dimension")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("bounds must satisfy lower < upper")

    @classmethod
    def unit(cls, d: int) -> "BoxDomain":
        return cls(d, (0.0,) * d, (1.0,) * d)


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs of the multistart search.

    ``value_tol`` stops a start once the simplex value spread falls below
    it; ``max_evals`` is the per-start evaluation budget. ``extra_starts``
    are additional seed points (e.g. warm starts from a related problem)
    appended to the generated ones.
    """

    value_tol: float = 1e-9
    max_evals: int = 20000
    seed: int = 0
    max_starts: int = 64
    initial_step: float = 0.25
    extra_starts: tuple = ()


@dataclass(frozen=True)
class OptResult:
    best_point: np.ndarray
    best_value: float
    evaluations: int
    converged: bool


def _latin_hypercube(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    sample = np.empty((m, d))
    for j in range(d):
        sample[:, j] = (rng.permutation(m) + rng.random(m)) / m
    return sample


def _starts(dom: BoxDomain, cfg: OptimizerConfig) -> np.ndarray:
    lo = np.asarray(dom.lower, dtype=float)
    hi = np.asarray(dom.upper, dtype=float)
    if 3**dom.d <= cfg.max_starts:
        axes = np.array([0.0, 0.5, 1.0])
        grids = np.meshgrid(*([axes] * dom.d), indexing="ij")
        unit = np.stack([g.ravel() for g in grids], axis=1)
    else:
        # Keep the all-corner and center points, fill the rest at random.
        fixed = np.array([[0.0] * dom.d, [0.5] * dom.d, [1.0] * dom.d])
        rng = np.random.default_rng(cfg.seed)
        unit = np.vstack([fixed, _latin_hypercube(rng, cfg.max_starts - 3, dom.d)])
    pts = lo + unit * (hi - lo)
    if cfg.extra_starts:
        extra = np.clip(np.asarray(cfg.extra_starts, dtype=float), lo, hi)
        pts = np.vstack([pts, extra.reshape(-1, dom.d)])
    return pts


def _nelder_mead_min(g, x0, lo, hi, cfg: OptimizerConfig):
    """One Nelder-Mead run minimizing g from x0; points clamped into the box."""
    d = x0.size
    step = cfg.initial_step * (hi - lo)
    simplex = [np.clip(x0, lo, hi)]
    for i in range(d):
        x = simplex[0].copy()
        x[i] = x[i] + step[i] if x[i] + step[i] <= hi[i] else x[i] - step[i]
        simplex.append(x)
    evals = 0

    def call(x):
        nonlocal evals
        evals += 1
        return g(x)

    values = [call(x) for x in simplex]
    converged = False
    while evals < cfg.max_evals:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        if values[-1] - values[0] < cfg.value_tol:
            converged = True
            break
        centroid = np.mean(simplex[:-1], axis=0)
        reflected = np.clip(centroid + _ALPHA * (centroid - simplex[-1]), lo, hi)
        fr = call(reflected)
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = reflected, fr
            continue
        if fr < values[0]:
            expanded = np.clip(centroid + _GAMMA * (centroid - simplex[-1]), lo, hi)
            fe = call(expanded)
            if fe < fr:
                simplex[-1], values[-1] = expanded, fe
            else:
                simplex[-1], values[-1] = reflected, fr
            continue
        contracted = np.clip(centroid + _BETA * (simplex[-1] - centroid), lo, hi)
        fc = call(contracted)
        if fc < values[-1]:
            simplex[-1], values[-1] = contracted, fc
            continue
        best = simplex[0]
        for i in range(1, d + 1):
            simplex[i] = np.clip(best + _DELTA * (simplex[i] - best), lo, hi)
            values[i] = call(simplex[i])
            if evals >= cfg.max_evals:
                break
    i_best = int(np.argmin(values))
    return simplex[i_best], values[i_best], evals, converged


def maximize(objective, dom: BoxDomain, cfg: OptimizerConfig = OptimizerConfig()) -> OptResult:
    """Best point of ``objective`` over the box, multistart Nelder-Mead.

    Deterministic for a fixed config. ``converged`` is True only if every
    start met the value tolerance within its budget.
    """
    lo = np.asarray(dom.lower, dtype=float)
    hi = np.asarray(dom.upper, dtype=float)

    def g(x):
        return -objective(x)

    best_x = None
    best_g = math.inf
    total_evals = 0
    all_converged = True
    for start in _starts(dom, cfg):
        x, gx, evals, conv = _nelder_mead_min(g, np.asarray(start, dtype=float), lo, hi, cfg)
        total_evals += evals
        all_converged = all_converged and conv
        if gx < best_g:
            best_x, best_g = x, gx
    return OptResult(best_x, -best_g, total_evals, all_converged)
