# services/pattern-packing/src/permpack/models/oracle.py
"""Exhaustive ground truth: extremal densities over S_N and over layered permutations"""
from __future__ import annotations

import heapq
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, List, Literal, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel

from ..config import OptimizerConfig, get_settings
from ..core.combination import FormalCombination, combination_density
from ..core.layered import (
    blocks_from_layers,
    compositions,
    count_occurrences_layered,
    from_layer_sequence,
)
from ..core.permutation import Permutation, longest_monotone, pattern_counts
from ..errors import CapExceededError, InconsistencyError
from ..utils.serialization import RationalModel
from .bounds import BoundResult, extended_price_bound, price_bound, validate_combination

logger = logging.getLogger(__name__)

WITNESS_LIMIT = 100
SANDWICH_TOL = 1e-7

Sense = Literal["max", "min"]
# pattern word -> coefficient, grouped by pattern length
_Grouped = Dict[int, List[Tuple[Tuple[int, ...], Fraction]]]


class ExtremalMode(str, Enum):
    MAX_ALL = "max_all"
    MAX_LAYERED = "max_layered"
    MIN_ALL = "min_all"
    MIN_LAYERED = "min_layered"


class ExtremalReport(BaseModel):
    N: int
    mode: ExtremalMode
    value: RationalModel
    value_float: float
    witnesses: List[str]
    witness_count: int
    truncated: bool = False

    @property
    def exact(self) -> Fraction:
        return self.value.to_fraction()


class ErdosSzekeresReport(BaseModel):
    N: int
    k: int
    all_contain: bool
    counterexample: Optional[str] = None
    scanned: int


class SandwichReport(BaseModel):
    lower: float
    lower_exact: Optional[RationalModel] = None
    upper: RationalModel
    upper_float: float
    width: float
    extended: bool = False
    bound: BoundResult
    extremal: ExtremalReport


def _check_sense(mode: str) -> Sense:
    if mode not in ("max", "min"):
        raise ValueError(f"mode must be 'max' or 'min', got {mode!r}")
    return mode


def _group_by_length(f: FormalCombination) -> _Grouped:
    grouped: _Grouped = {}
    for tau, c in f:
        grouped.setdefault(len(tau), []).append((tau.word, c))
    return grouped


def _density_from_counts(grouped: _Grouped, sigma: Permutation) -> Fraction:
    n = len(sigma)
    total = Fraction(0)
    for m, patterns in grouped.items():
        if m > n:
            continue
        counts = pattern_counts(sigma, m)
        total += sum(c * counts.get(word, 0) for word, c in patterns) / Fraction(comb(n, m))
    return total


def _better(candidate: Fraction, best: Optional[Fraction], sense: Sense) -> bool:
    if best is None:
        return True
    return candidate > best if sense == "max" else candidate < best


def _scan_prefix(
    args: Tuple[_Grouped, int, int, Sense]
) -> Tuple[Optional[Fraction], List[Permutation], int]:
    """Extremum, first witnesses (lexicographic) and witness count over S_N with sigma(1) = first"""
    grouped, N, first, sense = args
    rest = [v for v in range(1, N + 1) if v != first]
    best: Optional[Fraction] = None
    witnesses: List[Permutation] = []
    count = 0
    for tail in itertools.permutations(rest):
        sigma = Permutation((first,) + tail)
        value = _density_from_counts(grouped, sigma)
        if _better(value, best, sense):
            best, witnesses, count = value, [sigma], 1
        elif value == best:
            count += 1
            if len(witnesses) < WITNESS_LIMIT:
                witnesses.append(sigma)
    return best, witnesses, count


def _merge(
    parts: Sequence[Tuple[Optional[Fraction], List[Permutation], int]], sense: Sense
) -> Tuple[Fraction, List[Permutation], int]:
    best: Optional[Fraction] = None
    for value, _, _ in parts:
        if value is not None and _better(value, best, sense):
            best = value
    witnesses: List[Permutation] = []
    count = 0
    for value, chunk, chunk_count in parts:
        if value == best:
            witnesses.extend(chunk)
            count += chunk_count
    return best, sorted(witnesses)[:WITNESS_LIMIT], count


def _report(
    N: int, mode: ExtremalMode, value: Fraction, witnesses: Sequence[Permutation], count: int
) -> ExtremalReport:
    return ExtremalReport(
        N=N,
        mode=mode,
        value=RationalModel.from_fraction(value),
        value_float=float(value),
        witnesses=[str(w) for w in witnesses],
        witness_count=count,
        truncated=count > len(witnesses),
    )


def brute_force_pN(
    f: FormalCombination,
    N: int,
    mode: Sense = "max",
    force: bool = False,
    workers: Optional[int] = None,
) -> ExtremalReport:
    """Exact max/min of p(f, sigma) over all of S_N with the full extremal set"""
    sense = _check_sense(mode)
    settings = get_settings()
    cap = settings.brute_force_hard_cap if force else settings.brute_force_cap
    if N < 1:
        raise ValueError("N must be positive")
    if N > cap:
        raise CapExceededError(f"N = {N} exceeds the brute-force cap {cap}")
    workers = workers or settings.threads
    grouped = _group_by_length(f)
    tasks = [(grouped, N, first, sense) for first in range(1, N + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_prefix, tasks))
    else:
        parts = [_scan_prefix(task) for task in tasks]

    value, witnesses, count = _merge(parts, sense)
    extremal_mode = ExtremalMode.MAX_ALL if sense == "max" else ExtremalMode.MIN_ALL
    logger.info(f"{extremal_mode.value} of {f} over S_{N}: {value} ({count} witnesses)")
    return _report(N, extremal_mode, value, witnesses, count)


def layered_density(f: FormalCombination, lengths: Sequence[int]) -> Fraction:
    """p(f, sigma) for the layered sigma with the given layer lengths, from block lengths only"""
    N = sum(lengths)
    blocks = blocks_from_layers(lengths)
    total = Fraction(0)
    for tau, c in f:
        if len(tau) > N:
            continue
        total += c * Fraction(count_occurrences_layered(tau, blocks), comb(N, len(tau)))
    return total


def brute_force_pN_layered(
    f: FormalCombination, N: int, mode: Sense = "max", cross_check: bool = False
) -> ExtremalReport:
    """Exact max/min of p(f, sigma) over the 2^(N-1) layered sigma of length N"""
    sense = _check_sense(mode)
    cap = get_settings().layered_cap
    if N < 1:
        raise ValueError("N must be positive")
    if N > cap:
        raise CapExceededError(f"N = {N} exceeds the layered cap {cap}")

    best: Optional[Fraction] = None
    witnesses: List[Permutation] = []
    count = 0
    for lengths in compositions(N):
        value = layered_density(f, lengths)
        sigma = from_layer_sequence(lengths)
        if cross_check:
            direct = combination_density(f, sigma).exact
            if direct != value:
                raise InconsistencyError(
                    f"layered count {value} disagrees with direct count {direct} at {sigma}"
                )
        if _better(value, best, sense):
            best, witnesses, count = value, [sigma], 1
        elif value == best:
            count += 1
            witnesses.append(sigma)
            # compositions do not arrive in lexicographic order of sigma
            if len(witnesses) > 2 * WITNESS_LIMIT:
                witnesses = heapq.nsmallest(WITNESS_LIMIT, witnesses)

    extremal_mode = ExtremalMode.MAX_LAYERED if sense == "max" else ExtremalMode.MIN_LAYERED
    logger.info(f"{extremal_mode.value} of {f} at N = {N}: {best} ({count} witnesses)")
    return _report(N, extremal_mode, best, sorted(witnesses)[:WITNESS_LIMIT], count)


def erdos_szekeres_scan(N: int, k: int) -> ErdosSzekeresReport:
    """Look for a sigma in S_N with no monotone subsequence of length k+1"""
    cap = get_settings().brute_force_cap
    if N > cap:
        raise CapExceededError(f"N = {N} exceeds the brute-force cap {cap}")
    if k < 1:
        raise ValueError("k must be positive")
    scanned = 0
    for word in itertools.permutations(range(1, N + 1)):
        scanned += 1
        if longest_monotone(word, True) <= k and longest_monotone(word, False) <= k:
            sigma = Permutation(word)
            logger.info(f"{sigma} avoids monotone subsequences of length {k + 1}")
            return ErdosSzekeresReport(
                N=N, k=k, all_contain=False, counterexample=str(sigma), scanned=scanned
            )
    return ErdosSzekeresReport(N=N, k=k, all_contain=True, scanned=scanned)


def sandwich_report(
    f: FormalCombination,
    n_bound: int,
    N_brute: int,
    cfg: Optional[OptimizerConfig] = None,
    extended: bool = False,
) -> SandwichReport:
    """Interval [lower bound of order n_bound, p_{N_brute}(f)] containing p(f)"""
    validate_combination(f, require_conical=True)
    if extended:
        W = list(range(2, n_bound + 1))
        bound = extended_price_bound(f, n_bound, W, cfg)
    else:
        bound = price_bound(f, n_bound, cfg)
    extremal = brute_force_pN(f, N_brute, "max", workers=cfg.workers if cfg else None)
    upper = extremal.exact
    if bound.value > float(upper) + SANDWICH_TOL:
        raise InconsistencyError(
            f"lower bound {bound.value:.12g} exceeds p_{N_brute}(f) = {upper} for {f}"
        )
    return SandwichReport(
        lower=bound.value,
        lower_exact=bound.exact,
        upper=RationalModel.from_fraction(upper),
        upper_float=float(upper),
        width=float(upper) - bound.value,
        extended=extended,
        bound=bound,
        extremal=extremal,
    )


def extremal_frame(reports: Iterable[ExtremalReport]) -> pd.DataFrame:
    """One CSV row per report: N, value_num, value_den, witness_count"""
    rows = [
        {
            "N": r.N,
            "mode": r.mode.value,
            "value_num": r.value.num,
            "value_den": r.value.den,
            "witness_count": r.witness_count,
        }
        for r in reports
    ]
    return pd.DataFrame(rows, columns=["N", "mode", "value_num", "value_den", "witness_count"])
