# services/pattern-packing/src/permpack/core/permutation.py
"""Permutations, induced subpermutations and exact occurrence counting.

Positions in the public API are 1-based, matching the usual notation
sigma(1) sigma(2) ... sigma(n).
"""
from __future__ import annotations

import itertools
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Iterator, Sequence, Tuple

from ..errors import MalformedPermutationError, ParseError


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection of [n] stored as its word (sigma(1), ..., sigma(n))"""

    word: Tuple[int, ...]

    def __post_init__(self) -> None:
        word = tuple(int(v) for v in self.word)
        object.__setattr__(self, "word", word)
        if sorted(word) != list(range(1, len(word) + 1)):
            raise MalformedPermutationError(f"{word} is not a bijection of [{len(word)}]")

    def __len__(self) -> int:
        return len(self.word)

    def __iter__(self) -> Iterator[int]:
        return iter(self.word)

    def __getitem__(self, position: int) -> int:
        return self.word[position]

    def __str__(self) -> str:
        if len(self.word) <= 9:
            return "".join(str(v) for v in self.word)
        return ",".join(str(v) for v in self.word)

    def reverse(self) -> "Permutation":
        return Permutation(self.word[::-1])

    def complement(self) -> "Permutation":
        n = len(self.word)
        return Permutation(tuple(n + 1 - v for v in self.word))

    def reverse_complement(self) -> "Permutation":
        return self.reverse().complement()

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.word)
        for position, value in enumerate(self.word, start=1):
            inv[value - 1] = position
        return Permutation(tuple(inv))


@dataclass(frozen=True)
class DensityValue:
    """Exact density with a float view"""

    exact: Fraction

    @property
    def float(self) -> float:
        return float(self.exact)

    def to_json(self) -> Dict[str, object]:
        return {"num": self.exact.numerator, "den": self.exact.denominator, "float": self.float}

    def __str__(self) -> str:
        return str(self.exact)


def parse_permutation(text: str) -> Permutation:
    """Parse "68153427" (values <= 9 only) or "10,2,3,..." into a Permutation"""
    token = text.strip().strip("()")
    if not token:
        return Permutation(())
    try:
        if "," in token:
            values = tuple(int(part) for part in token.split(","))
        elif token.isdigit():
            values = tuple(int(ch) for ch in token)
        else:
            raise ParseError(f"cannot parse permutation {text!r}")
    except ValueError as e:
        raise ParseError(f"cannot parse permutation {text!r}: {e}") from e
    return Permutation(values)


def make_identity(n: int) -> Permutation:
    if n < 0:
        raise ValueError("n must be non-negative")
    return Permutation(tuple(range(1, n + 1)))


def make_reverse(n: int) -> Permutation:
    if n < 0:
        raise ValueError("n must be non-negative")
    return Permutation(tuple(range(n, 0, -1)))


def standardize(values: Sequence[int]) -> Tuple[int, ...]:
    """Order-isomorphic word over [len(values)]"""
    ranks = {v: r for r, v in enumerate(sorted(values), start=1)}
    return tuple(ranks[v] for v in values)


def induced_subpermutation(sigma: Permutation, positions: Sequence[int]) -> Permutation:
    """sigma[A] for a strictly increasing set A of 1-based positions"""
    previous = 0
    for p in positions:
        if p <= previous:
            raise ValueError(f"positions must be strictly increasing: {list(positions)}")
        if p > len(sigma):
            raise IndexError(f"position {p} out of range for length {len(sigma)}")
        previous = p
    return Permutation(standardize([sigma.word[p - 1] for p in positions]))


def count_occurrences(tau: Permutation, sigma: Permutation) -> int:
    """Lambda(tau, sigma): number of position sets A with sigma[A] = tau"""
    m, n = len(tau), len(sigma)
    if m > n:
        return 0
    if m == 0:
        return 1
    t = tau.word
    s = sigma.word
    chosen = [0] * m

    def extend(depth: int, start: int) -> int:
        total = 0
        # leave room for the remaining m - depth - 1 points
        for i in range(start, n - (m - depth) + 1):
            value = s[i]
            for prev in range(depth):
                if (s[chosen[prev]] < value) != (t[prev] < t[depth]):
                    break
            else:
                if depth == m - 1:
                    total += 1
                else:
                    chosen[depth] = i
                    total += extend(depth + 1, i + 1)
        return total

    return extend(0, 0)


def density(tau: Permutation, sigma: Permutation) -> DensityValue:
    """p(tau, sigma); exactly 0 when |tau| > |sigma|"""
    m, n = len(tau), len(sigma)
    if m > n:
        return DensityValue(Fraction(0))
    return DensityValue(Fraction(count_occurrences(tau, sigma), comb(n, m)))


def all_permutations(n: int) -> Iterator[Permutation]:
    """S_n in lexicographic order"""
    for word in itertools.permutations(range(1, n + 1)):
        yield Permutation(word)


def pattern_counts(sigma: Permutation, m: int) -> Counter:
    """Occurrence count of every pattern of length m in sigma, in one pass"""
    counts: Counter = Counter()
    if m > len(sigma):
        return counts
    s = sigma.word
    for positions in itertools.combinations(range(len(s)), m):
        counts[standardize([s[p] for p in positions])] += 1
    return counts


def delete_position(sigma: Permutation, position: int) -> Permutation:
    """sigma[[n] minus {position}]"""
    keep = [p for p in range(1, len(sigma) + 1) if p != position]
    return induced_subpermutation(sigma, keep)


def longest_monotone(word: Iterable[int], increasing: bool = True) -> int:
    """Length of the longest strictly monotone subsequence (patience sorting)"""

    tails: list = []
    for v in word:
        key = v if increasing else -v
        idx = bisect_left(tails, key)
        if idx == len(tails):
            tails.append(key)
        else:
            tails[idx] = key
    return len(tails)
