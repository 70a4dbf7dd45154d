# services/pattern-packing/src/permpack/models/bounds.py
"""Price bounds, Extended Price bounds, Minimization Price bounds and closed forms.

The plain bound of order n maximizes q_{n,f}; the extended bound of order n
relative to W maximizes g_{n,f} with the antilayer slots indexed by W
(1-based, W a subset of [n]) forced to zero; the minimization bound
minimizes q_{n,f}. All values are "best found" by the multi-start optimizer.
"""
from __future__ import annotations

import logging
from enum import Enum
from fractions import Fraction
from math import factorial
from typing import Iterable, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from ..config import OptimizerConfig, get_settings
from ..core.combination import FormalCombination
from ..core.layered import BlockSeq, is_layered, reverse_blocks
from ..errors import CapExceededError, HypothesisError, NonConicalError, NotLayeredError
from ..utils.metrics import sequence_metrics
from ..utils.serialization import RationalModel
from .price_polynomial import SparsePolynomial, combine
from .simplex_optimizer import OptimizationResult, maximize_on_simplex, minimize_on_simplex

logger = logging.getLogger(__name__)

WPolicy = Literal["all", "none", "all-but-first"]


class BoundMode(str, Enum):
    PACK = "pack"
    PACK_EXTENDED = "pack_extended"
    MINIMIZE = "minimize"
    MINIMIZE_EXTENDED = "minimize_extended"

    @property
    def extended(self) -> bool:
        return self in (BoundMode.PACK_EXTENDED, BoundMode.MINIMIZE_EXTENDED)

    @property
    def maximizes(self) -> bool:
        return self in (BoundMode.PACK, BoundMode.PACK_EXTENDED)


class BoundResult(BaseModel):
    mode: BoundMode
    n: int
    W: List[int] = Field(default_factory=list)
    value: float
    exact: Optional[RationalModel] = None
    witness: List[float]
    starts_used: int
    iterations: int
    method: str = ""

    @property
    def exact_value(self) -> Optional[Fraction]:
        return self.exact.to_fraction() if self.exact else None


class BoundSequenceReport(BaseModel):
    mode: BoundMode
    w_policy: Optional[str] = None
    results: List[BoundResult]
    monotone: bool
    metrics: dict
    diagnostics: List[str] = Field(default_factory=list)

    @property
    def values(self) -> List[float]:
        return [r.value for r in self.results]


def recognize_rational(x: float, max_den: int = 64, tol: float = 1e-9) -> Optional[Fraction]:
    """p/q with q <= max_den within tol of x, if any"""
    candidate = Fraction(x).limit_denominator(max_den)
    return candidate if abs(float(candidate) - x) <= tol else None


def _exact_value(P: SparsePolynomial, result: OptimizationResult) -> Optional[Fraction]:
    coords = [recognize_rational(c) for c in result.point]
    if any(c is None for c in coords) or sum(coords) != 1:
        return None
    exact = P.evaluate(coords)
    if abs(float(exact) - result.value) > 1e-9:
        return None
    return exact


def validate_combination(f: FormalCombination, require_conical: bool, force: bool = False) -> None:
    settings = get_settings()
    if not len(f):
        raise HypothesisError("combination is empty")
    for tau, _ in f:
        if not is_layered(tau):
            raise NotLayeredError(f"pattern {tau} is not layered")
        if len(tau) > settings.max_pattern_length:
            raise CapExceededError(
                f"pattern {tau} longer than {settings.max_pattern_length}"
            )
    if require_conical and not f.is_conical and not force:
        raise NonConicalError(f"{f} is not a conical combination (use force to override)")


def _check_order(n: int) -> None:
    cap = get_settings().max_order
    if n < 1:
        raise ValueError("order n must be positive")
    if n > cap:
        raise CapExceededError(f"order {n} exceeds cap {cap}")


def _check_w(W: Iterable[int], n: int) -> List[int]:
    W = sorted(set(W))
    if any(j < 1 or j > n for j in W):
        raise ValueError(f"W must be a subset of [1..{n}], got {W}")
    return W


def _result(
    mode: BoundMode, n: int, W: List[int], P: SparsePolynomial, run: OptimizationResult
) -> BoundResult:
    exact = _exact_value(P, run)
    return BoundResult(
        mode=mode,
        n=n,
        W=W,
        value=run.value,
        exact=RationalModel.from_fraction(exact) if exact is not None else None,
        witness=list(run.point.coords),
        starts_used=run.starts_used,
        iterations=run.iterations,
        method=run.method,
    )


def price_bound(
    f: FormalCombination,
    n: int,
    cfg: Optional[OptimizerConfig] = None,
    force: bool = False,
    extra_seeds: Sequence[Sequence[float]] = (),
) -> BoundResult:
    """Best-found maximum of q_{n,f} over the simplex"""
    validate_combination(f, require_conical=True, force=force)
    _check_order(n)
    P = combine(f, "plain", n)
    run = maximize_on_simplex(P, cfg=cfg, extra_seeds=extra_seeds, allow_mixed_sign=force)
    return _result(BoundMode.PACK, n, [], P, run)


def extended_price_bound(
    f: FormalCombination,
    n: int,
    W: Iterable[int] = (),
    cfg: Optional[OptimizerConfig] = None,
    force: bool = False,
    extra_seeds: Sequence[Sequence[float]] = (),
) -> BoundResult:
    """Best-found maximum of g_{n,f} with x_{2j-1} = 0 for every j in W"""
    validate_combination(f, require_conical=True, force=force)
    _check_order(n)
    W = _check_w(W, n)
    P = combine(f, "extended", n)
    forced = [2 * j - 2 for j in W]
    run = maximize_on_simplex(
        P, forced_zero=forced, cfg=cfg, extra_seeds=extra_seeds, allow_mixed_sign=force
    )
    return _result(BoundMode.PACK_EXTENDED, n, W, P, run)


def min_price_bound(
    f: FormalCombination,
    n: int,
    cfg: Optional[OptimizerConfig] = None,
    force: bool = False,
    extra_seeds: Sequence[Sequence[float]] = (),
) -> BoundResult:
    """Best-found minimum of q_{n,f} over the simplex"""
    validate_combination(f, require_conical=True, force=force)
    _check_order(n)
    P = combine(f, "plain", n)
    run = minimize_on_simplex(P, cfg=cfg, extra_seeds=extra_seeds)
    return _result(BoundMode.MINIMIZE, n, [], P, run)


def min_extended_price_bound(
    f: FormalCombination,
    n: int,
    W: Iterable[int] = (),
    cfg: Optional[OptimizerConfig] = None,
    force: bool = False,
    extra_seeds: Sequence[Sequence[float]] = (),
) -> BoundResult:
    """Best-found minimum of g_{n,f} with x_{2j-1} = 0 for every j in W"""
    validate_combination(f, require_conical=True, force=force)
    _check_order(n)
    W = _check_w(W, n)
    P = combine(f, "extended", n)
    run = minimize_on_simplex(
        P, cfg=cfg, forced_zero=[2 * j - 2 for j in W], extra_seeds=extra_seeds
    )
    return _result(BoundMode.MINIMIZE_EXTENDED, n, W, P, run)


def closed_form_hypothesis(blocks: BlockSeq) -> Tuple[str, BlockSeq]:
    """Which closed-form path applies, with the blocks oriented so no antilayer is last.

    Paths: "trivial" (one block), "antilayer" (one antilayer of length a >= 2,
    every layer >= a, 2^a - a - 1 >= k), "layers" (no antilayer,
    2^(shortest layer) >= 1 + k).
    """
    antilayers = blocks.antilayers
    layers = blocks.layers
    k = len(layers)
    if len(blocks) == 1:
        return "trivial", blocks
    if len(antilayers) == 1:
        a = antilayers[0]
        if a < 2:
            raise HypothesisError("antilayer length a = 1, need a >= 2")
        short = [length for length in layers if length < a]
        if short:
            raise HypothesisError(f"layers {short} are shorter than the antilayer a = {a}")
        if 2**a - a - 1 < k:
            raise HypothesisError(f"2^{a} - {a} - 1 = {2**a - a - 1} < k = {k}")
        oriented = reverse_blocks(blocks) if blocks.blocks[-1].is_antilayer else blocks
        return "antilayer", oriented
    if not antilayers:
        shortest = min(layers)
        if 2**shortest < 1 + k:
            raise HypothesisError(f"2^{shortest} = {2**shortest} < 1 + k = {1 + k}")
        return "layers", blocks
    raise HypothesisError(f"{len(antilayers)} antilayers; at most one is supported")


def closed_form_packing(blocks: BlockSeq) -> Fraction:
    """|s|!/|s|^|s| * prod over blocks of len^len / len! once a hypothesis path holds"""
    path, _ = closed_form_hypothesis(blocks)
    size = blocks.size
    value = Fraction(factorial(size), size**size)
    for block in blocks:
        value *= Fraction(block.length**block.length, factorial(block.length))
    logger.info(f"closed form for ({blocks}) via {path} path: {value}")
    return value


def closed_form_order_and_w(blocks: BlockSeq) -> Tuple[BlockSeq, int, List[int]]:
    """Orientation, order k and W = [k] minus {j} at which the extended bound equals p(sigma)"""
    path, oriented = closed_form_hypothesis(blocks)
    if path == "trivial":
        return oriented, 1, [] if oriented.antilayers else [1]
    k = len(oriented.layers)
    if path != "antilayer":
        return oriented, k, list(range(1, k + 1))
    j = next(i for i, b in enumerate(oriented.blocks, start=1) if b.is_antilayer)
    return oriented, k, [w for w in range(1, k + 1) if w != j]


def closed_form_point(blocks: BlockSeq) -> List[Fraction]:
    """Maximizer of the extended polynomial of order k: block lengths over |sigma| in slot order"""
    oriented, k, _ = closed_form_order_and_w(blocks)
    total = sum(b.length for b in oriented.blocks)
    point = [Fraction(0)] * (2 * k)
    i = 0
    for b in oriented.blocks:
        if b.is_antilayer:
            point[2 * i] = Fraction(b.length, total)
        else:
            point[2 * i + 1] = Fraction(b.length, total)
            i += 1
    return point


def min_mono_value(ell: int, k: int) -> Fraction:
    """Limit minimum density of Id_ell + Rev_k over layered permutations: 1/(ell-1)^(k-1)"""
    if not k >= ell >= 3:
        raise HypothesisError(f"need k >= ell >= 3, got ell = {ell}, k = {k}")
    return Fraction(1, (ell - 1) ** (k - 1))


def _policy_w(policy: WPolicy, n: int) -> List[int]:
    if policy == "all":
        return list(range(1, n + 1))
    if policy == "none":
        return []
    return list(range(2, n + 1))


def bound_sequence(
    f: FormalCombination,
    n_max: int,
    mode: BoundMode = BoundMode.PACK,
    cfg: Optional[OptimizerConfig] = None,
    w_policy: WPolicy = "all-but-first",
    force: bool = False,
) -> BoundSequenceReport:
    """Bounds for n = 1..n_max, each order warm-started from the zero-padded previous witness"""
    mode = BoundMode(mode)
    cfg = cfg or OptimizerConfig()
    _check_order(n_max)
    results: List[BoundResult] = []
    previous: Optional[List[float]] = None
    for n in range(1, n_max + 1):
        seeds = []
        if previous is not None:
            seeds = [previous + [0.0, 0.0] if mode.extended else previous + [0.0]]
        if mode == BoundMode.PACK:
            result = price_bound(f, n, cfg, force, seeds)
        elif mode == BoundMode.MINIMIZE:
            result = min_price_bound(f, n, cfg, force, seeds)
        elif mode == BoundMode.PACK_EXTENDED:
            result = extended_price_bound(f, n, _policy_w(w_policy, n), cfg, force, seeds)
        else:
            result = min_extended_price_bound(f, n, _policy_w(w_policy, n), cfg, force, seeds)
        results.append(result)
        previous = result.witness
        logger.info(f"{mode.value} bound of order {n}: {result.value:.12g}")

    sense = "non-decreasing" if mode.maximizes else "non-increasing"
    metrics = sequence_metrics([r.value for r in results], sense)
    diagnostics: List[str] = []
    for prev, cur in zip(results, results[1:]):
        delta = cur.value - prev.value
        if (mode.maximizes and delta < -cfg.value_tol) or (
            not mode.maximizes and delta > cfg.value_tol
        ):
            diagnostics.append(
                f"optimizer failure: order {cur.n} value {cur.value:.12g} breaks the "
                f"{sense} sequence (order {prev.n}: {prev.value:.12g})"
            )
    for message in diagnostics:
        logger.warning(message)
    return BoundSequenceReport(
        mode=mode,
        w_policy=w_policy if mode.extended else None,
        results=results,
        monotone=not diagnostics,
        metrics=metrics,
        diagnostics=diagnostics,
    )
