# services/pattern-packing/src/permpack/models/simplex_optimizer.py
"""Maximize / minimize a SparsePolynomial over the probability simplex.

Maximization of non-negative polynomials uses the Baum-Eagon growth
transform x_i <- x_i dP/dx_i / sum_j x_j dP/dx_j, which never decreases P.
Minimization (and maximization of mixed-sign polynomials) uses projected
gradient descent with Armijo backtracking. Forced-zero coordinates are
removed from the problem before optimizing. Indices are 0-based.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Literal, Optional, Sequence, Tuple

import numpy as np

from ..config import OptimizerConfig
from ..errors import HypothesisError, InfeasibleError
from .price_polynomial import SparsePolynomial

logger = logging.getLogger(__name__)

SNAP_TOL = 1e-15
ARMIJO = 1e-4


@dataclass(frozen=True)
class SimplexPoint:
    """Point of the standard simplex"""

    coords: Tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if any(c < 0 for c in coords):
            raise ValueError(f"negative coordinate in {coords}")
        if coords and abs(sum(coords) - 1.0) > 1e-12:
            raise ValueError(f"coordinates sum to {sum(coords)}, not 1")

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords)


@dataclass(frozen=True)
class OptimizationResult:
    value: float
    point: SimplexPoint
    starts_used: int
    iterations: int
    method: str
    ascent_violations: int = 0


@dataclass(frozen=True)
class _LocalRun:
    value: float
    point: Tuple[float, ...]
    iterations: int
    ascent_violations: int


def project_onto_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1} (sort-based)"""
    n = len(v)
    u = -np.sort(-v)
    thresholds = (np.cumsum(u) - 1.0) / np.arange(1, n + 1)
    rho = np.nonzero(u > thresholds)[0][-1]
    return np.maximum(v - thresholds[rho], 0.0)


def _normalize(x: np.ndarray) -> np.ndarray:
    x = np.where(x < SNAP_TOL, 0.0, x)
    total = x.sum()
    return x / total if total > 0 else np.full(len(x), 1.0 / len(x))


def structured_seeds(
    P: SparsePolynomial, n: Optional[int] = None, forced_zero: Iterable[int] = ()
) -> List[np.ndarray]:
    """Uniform points on the first m free coordinates, plus x_i proportional to deg_i P"""
    n = P.num_vars if n is None else n
    forced = set(forced_zero)
    free = [i for i in range(n) if i not in forced]
    seeds: List[np.ndarray] = []
    for m in range(1, len(free) + 1):
        x = np.zeros(n)
        x[free[:m]] = 1.0 / m
        seeds.append(x)
    degrees = np.array(P.max_exponents()[:n], dtype=float)
    degrees[list(forced)] = 0.0
    if degrees.sum() > 0:
        seeds.append(degrees / degrees.sum())
    return seeds


def _baum_eagon(P: SparsePolynomial, x0: np.ndarray, cfg: OptimizerConfig) -> _LocalRun:
    x = _normalize(x0)
    value, grad = P.value_and_gradient(x)
    violations = 0
    iterations = 0
    for iterations in range(1, cfg.max_iters + 1):
        weights = x * grad
        total = weights.sum()
        if value <= 0 or total <= 0:
            break
        x_new = _normalize(weights / total)
        new_value, new_grad = P.value_and_gradient(x_new)
        if cfg.debug and new_value < value - 1e-12 * max(1.0, abs(value)):
            violations += 1
            logger.warning(f"ascent violated at iteration {iterations}: {value} -> {new_value}")
        step = float(np.abs(x_new - x).max())
        gain = new_value - value
        x, value, grad = x_new, new_value, new_grad
        if step < cfg.step_tol or (step < 1e-6 and gain <= 1e-15 * max(1.0, abs(value))):
            break
    return _LocalRun(value, tuple(x.tolist()), iterations, violations)


def _projected_descent(P: SparsePolynomial, x0: np.ndarray, cfg: OptimizerConfig) -> _LocalRun:
    x = project_onto_simplex(np.asarray(x0, dtype=float))
    value, grad = P.value_and_gradient(x)
    t = 1.0
    iterations = 0
    for iterations in range(1, cfg.max_iters + 1):
        accepted = False
        while t > 1e-20:
            x_new = _normalize(project_onto_simplex(x - t * grad))
            new_value, new_grad = P.value_and_gradient(x_new)
            if new_value <= value + ARMIJO * float(grad @ (x_new - x)):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        step = float(np.abs(x_new - x).max())
        drop = value - new_value
        x, value, grad = x_new, new_value, new_grad
        t = min(t * 2.0, 1e6)
        if step < cfg.step_tol or (step < 1e-6 and drop <= 1e-15 * max(1.0, abs(value))):
            break
    return _LocalRun(value, tuple(x.tolist()), iterations, 0)


def _run_start(args: Tuple[SparsePolynomial, np.ndarray, OptimizerConfig, str]) -> _LocalRun:
    P, x0, cfg, method = args
    if method == "baum-eagon":
        return _baum_eagon(P, x0, cfg)
    run = _projected_descent(P, x0, cfg)
    if method == "projected-ascent":
        return _LocalRun(-run.value, run.point, run.iterations, 0)
    return run


def _tie_key(point: Tuple[float, ...]) -> Tuple[float, ...]:
    return tuple(sorted(point, reverse=True))


def _reduce(runs: Sequence[_LocalRun], sense: Literal["max", "min"]) -> _LocalRun:
    """Best value, ties broken by the lexicographically smallest descending-sorted witness"""
    values = [r.value for r in runs]
    best = max(values) if sense == "max" else min(values)
    tol = 1e-12 * max(1.0, abs(best))
    tied = [r for r in runs if abs(r.value - best) <= tol]
    return min(tied, key=lambda r: (_tie_key(r.point), r.point))


def _optimize(
    P: SparsePolynomial,
    sense: Literal["max", "min"],
    forced_zero: Iterable[int],
    cfg: Optional[OptimizerConfig],
    extra_seeds: Iterable[Sequence[float]],
    allow_mixed_sign: bool,
) -> OptimizationResult:
    cfg = cfg or OptimizerConfig()
    n = P.num_vars
    forced = sorted(set(forced_zero))
    if any(i < 0 or i >= n for i in forced):
        raise IndexError(f"forced-zero index out of range for {n} variables: {forced}")
    free = [i for i in range(n) if i not in set(forced)]
    if not free:
        raise InfeasibleError("every coordinate is forced to zero")
    R = P.restrict(free)
    d = len(free)

    if sense == "max":
        if R.has_nonnegative_coefficients:
            method = "baum-eagon"
            objective = R
        elif allow_mixed_sign:
            method = "projected-ascent"
            objective = -R
        else:
            raise HypothesisError(
                "multiplicative updates need non-negative coefficients; allow mixed sign to fall back"
            )
    else:
        method = "projected-descent"
        objective = R

    starts: List[np.ndarray] = structured_seeds(R)
    for seed in extra_seeds:
        seed = np.asarray(seed, dtype=float)
        if len(seed) != n:
            raise ValueError(f"extra seed has dimension {len(seed)}, expected {n}")
        reduced = np.maximum(seed[free], 0.0)
        if reduced.sum() > 0:
            starts.append(reduced / reduced.sum())
    random_count = max(cfg.starts - len(starts), 0)
    if random_count:
        rng = np.random.default_rng(cfg.seed)
        starts.extend(rng.dirichlet(np.ones(d), size=random_count))

    tasks = [(objective, x0, cfg, method) for x0 in starts]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(_run_start, tasks))
    else:
        runs = [_run_start(task) for task in tasks]

    best = _reduce(runs, sense)
    full = np.zeros(n)
    full[free] = best.point
    logger.info(
        f"{method} over {d}/{n} free coordinates: best {best.value:.12g} from {len(runs)} starts"
    )
    return OptimizationResult(
        value=best.value,
        point=SimplexPoint(tuple(full.tolist())),
        starts_used=len(runs),
        iterations=sum(r.iterations for r in runs),
        method=method,
        ascent_violations=sum(r.ascent_violations for r in runs),
    )


def maximize_on_simplex(
    P: SparsePolynomial,
    forced_zero: Iterable[int] = (),
    cfg: Optional[OptimizerConfig] = None,
    extra_seeds: Iterable[Sequence[float]] = (),
    allow_mixed_sign: bool = False,
) -> OptimizationResult:
    """Best-found maximum of P over the simplex with the given coordinates fixed at 0"""
    return _optimize(P, "max", forced_zero, cfg, extra_seeds, allow_mixed_sign)


def minimize_on_simplex(
    P: SparsePolynomial,
    cfg: Optional[OptimizerConfig] = None,
    forced_zero: Iterable[int] = (),
    extra_seeds: Iterable[Sequence[float]] = (),
) -> OptimizationResult:
    """Best-found minimum of P over the simplex"""
    return _optimize(P, "min", forced_zero, cfg, extra_seeds, True)


def simplex_lattice(n: int, denominator: int) -> Iterator[Tuple[int, ...]]:
    """All non-negative integer vectors of length n summing to denominator"""
    if n == 1:
        yield (denominator,)
        return
    for value in range(denominator + 1):
        for rest in simplex_lattice(n - 1, denominator - value):
            yield (value,) + rest


def grid_optimum(
    P: SparsePolynomial, denominator: int = 200, sense: Literal["max", "min"] = "max"
) -> Tuple[float, np.ndarray]:
    """Exhaustive evaluation of P on the simplex lattice with the given denominator"""
    points = np.array(list(simplex_lattice(P.num_vars, denominator)), dtype=float) / denominator
    if P.is_zero:
        return 0.0, points[0]
    coef = np.array([float(c) for c in P.terms.values()])
    exps = np.array(list(P.terms.keys()), dtype=int)
    values = np.prod(points[:, None, :] ** exps[None, :, :], axis=2) @ coef
    idx = int(np.argmax(values) if sense == "max" else np.argmin(values))
    return float(values[idx]), points[idx]
