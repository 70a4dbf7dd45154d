# services/pattern-packing/src/permpack/core/combination.py
"""Finite formal linear combinations of permutations and their densities"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple, Union

from ..errors import ParseError
from .permutation import DensityValue, Permutation, density, parse_permutation

Coefficient = Union[int, Fraction, str]

_TERM = re.compile(r"^(?:(?P<coef>\d+(?:/\d+)?)\s*\*\s*)?(?P<perm>[\d,()]+)$")


@dataclass(frozen=True)
class FormalCombination:
    """Map pattern -> rational coefficient; zero coefficients are never stored"""

    terms: Mapping[Permutation, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        merged: Dict[Permutation, Fraction] = {}
        for tau, c in dict(self.terms).items():
            merged[tau] = merged.get(tau, Fraction(0)) + Fraction(c)
        object.__setattr__(
            self, "terms", {tau: c for tau, c in sorted(merged.items()) if c != 0}
        )

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Coefficient, Permutation]]) -> "FormalCombination":
        merged: Dict[Permutation, Fraction] = {}
        for c, tau in pairs:
            merged[tau] = merged.get(tau, Fraction(0)) + Fraction(c)
        return cls(merged)

    @classmethod
    def single(cls, tau: Permutation, coefficient: Coefficient = 1) -> "FormalCombination":
        return cls({tau: Fraction(coefficient)})

    def __iter__(self) -> Iterator[Tuple[Permutation, Fraction]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def is_conical(self) -> bool:
        return all(c >= 0 for c in self.terms.values())

    @property
    def max_pattern_length(self) -> int:
        return max((len(t) for t in self.terms), default=0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for tau, c in self.terms.items():
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {abs(c)}*{tau}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def parse_combination(text: str) -> FormalCombination:
    """Parse "c1*perm1 + c2*perm2 - ..." (coefficient optional, may be p/q)"""
    normalized = text.replace("−", "-").strip()
    if not normalized:
        raise ParseError("empty combination")
    tokens = re.split(r"([+-])", normalized)
    pairs: List[Tuple[Fraction, Permutation]] = []
    sign = 1
    expect_term = True
    for token in tokens:
        token = token.strip()
        if not token:
            continue
        if token in ("+", "-"):
            if expect_term:
                # leading or doubled sign
                sign = -sign if token == "-" else sign
            else:
                sign = -1 if token == "-" else 1
                expect_term = True
            continue
        match = _TERM.match(token.replace(" ", ""))
        if not match or not expect_term:
            raise ParseError(f"cannot parse combination term {token!r} in {text!r}")
        coef = Fraction(match.group("coef")) if match.group("coef") else Fraction(1)
        pairs.append((sign * coef, parse_permutation(match.group("perm"))))
        sign = 1
        expect_term = False
    if expect_term:
        raise ParseError(f"combination {text!r} ends with an operator")
    return FormalCombination.from_pairs(pairs)


def combination_density(f: FormalCombination, sigma: Permutation) -> DensityValue:
    """p(f, sigma) = sum of c_tau * p(tau, sigma), exactly"""
    total = Fraction(0)
    for tau, c in f:
        total += c * density(tau, sigma).exact
    return DensityValue(total)
