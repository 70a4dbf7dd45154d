# services/pattern-packing/src/permpack/models/price_polynomial.py
"""Price polynomials q_{n,tau} and Extended Price polynomials g_{n,tau}.

Both are stored as exact sparse polynomials. Variable indices are 0-based
here; in g the slot with 0-based index i is an antilayer when i is even
(1-based odd) and a layer when i is odd.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial, prod
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from ..core.combination import FormalCombination
from ..core.layered import enumerate_quasi_blocks, layer_sequence
from ..core.permutation import Permutation
from ..errors import DimensionMismatchError

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
Number = Union[int, Fraction, float]


@dataclass(frozen=True)
class SparsePolynomial:
    """Polynomial as {exponent vector: rational coefficient}, canonically sorted"""

    num_vars: int
    terms: Mapping[Exponents, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean: Dict[Exponents, Fraction] = {}
        for exps, c in dict(self.terms).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.num_vars:
                raise DimensionMismatchError(
                    f"exponent vector {exps} has length {len(exps)}, expected {self.num_vars}"
                )
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            clean[exps] = clean.get(exps, Fraction(0)) + Fraction(c)
        object.__setattr__(
            self, "terms", {e: c for e, c in sorted(clean.items(), reverse=True) if c != 0}
        )

    @classmethod
    def from_terms(
        cls, num_vars: int, terms: Iterable[Tuple[Union[int, Fraction], Exponents]]
    ) -> "SparsePolynomial":
        merged: Dict[Exponents, Fraction] = {}
        for c, exps in terms:
            key = tuple(exps)
            merged[key] = merged.get(key, Fraction(0)) + Fraction(c)
        return cls(num_vars, merged)

    @classmethod
    def zero(cls, num_vars: int) -> "SparsePolynomial":
        return cls(num_vars, {})

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        if other.num_vars != self.num_vars:
            raise DimensionMismatchError("cannot add polynomials over different variable counts")
        merged = dict(self.terms)
        for e, c in other.terms.items():
            merged[e] = merged.get(e, Fraction(0)) + c
        return SparsePolynomial(self.num_vars, merged)

    def scale(self, factor: Union[int, Fraction]) -> "SparsePolynomial":
        factor = Fraction(factor)
        return SparsePolynomial(self.num_vars, {e: c * factor for e, c in self.terms.items()})

    def __neg__(self) -> "SparsePolynomial":
        return self.scale(-1)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    @property
    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    @property
    def has_nonnegative_coefficients(self) -> bool:
        return all(c >= 0 for c in self.terms.values())

    def max_exponents(self) -> List[int]:
        """Largest exponent of each variable over all terms"""
        top = [0] * self.num_vars
        for exps in self.terms:
            for i, e in enumerate(exps):
                top[i] = max(top[i], e)
        return top

    def restrict(self, free: Sequence[int]) -> "SparsePolynomial":
        """Set every variable outside `free` to zero and renumber the rest"""
        free = list(free)
        free_set = set(free)
        kept: Dict[Exponents, Fraction] = {}
        for exps, c in self.terms.items():
            if any(e > 0 and i not in free_set for i, e in enumerate(exps)):
                continue
            kept[tuple(exps[i] for i in free)] = c
        return SparsePolynomial(len(free), kept)

    @cached_property
    def _coefficient_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.terms.values()], dtype=float)

    @cached_property
    def _exponent_matrix(self) -> np.ndarray:
        if not self.terms:
            return np.zeros((0, self.num_vars), dtype=int)
        return np.array(list(self.terms.keys()), dtype=int)

    def _check_dimension(self, x: Sequence) -> None:
        if len(x) != self.num_vars:
            raise DimensionMismatchError(
                f"point has dimension {len(x)}, polynomial has {self.num_vars} variables"
            )

    def evaluate(self, x: Sequence[Number]) -> Number:
        """Exact Fraction when every coordinate is int/Fraction, float otherwise"""
        self._check_dimension(x)
        if all(isinstance(v, (int, Fraction)) for v in x):
            total = Fraction(0)
            for exps, c in self.terms.items():
                total += c * prod((Fraction(v) ** e for v, e in zip(x, exps)), start=Fraction(1))
            return total
        return self.value_and_gradient(np.asarray(x, dtype=float))[0]

    def gradient(self, x: Sequence[Number]) -> List[Number]:
        self._check_dimension(x)
        if all(isinstance(v, (int, Fraction)) for v in x):
            grad = [Fraction(0)] * self.num_vars
            for exps, c in self.terms.items():
                for i, e in enumerate(exps):
                    if e == 0:
                        continue
                    term = c * e
                    for j, (v, f) in enumerate(zip(x, exps)):
                        term *= Fraction(v) ** (f - 1 if j == i else f)
                    grad[i] += term
            return grad
        return self.value_and_gradient(np.asarray(x, dtype=float))[1].tolist()

    def value_and_gradient(self, x: np.ndarray) -> Tuple[float, np.ndarray]:
        """Vectorised float evaluation of P(x) and its gradient"""
        self._check_dimension(x)
        coef = self._coefficient_array
        exps = self._exponent_matrix
        if coef.size == 0:
            return 0.0, np.zeros(self.num_vars)
        powers = x[None, :] ** exps
        ones = np.ones((len(coef), 1))
        # left[:, i] = prod_{j<i} powers[:, j], right[:, i] = prod_{j>i} powers[:, j]
        left = np.cumprod(np.hstack([ones, powers[:, :-1]]), axis=1)
        right = np.flip(np.cumprod(np.flip(np.hstack([powers[:, 1:], ones]), axis=1), axis=1), axis=1)
        value = float(coef @ (left[:, -1] * powers[:, -1]))
        derivative = exps * x[None, :] ** np.maximum(exps - 1, 0)
        grad = coef @ (left * right * derivative)
        return value, np.asarray(grad, dtype=float)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.terms.items():
            factors = [
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(exps) if e > 0
            ]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {
            "vars": self.num_vars,
            "terms": [
                {"c": {"num": c.numerator, "den": c.denominator}, "e": list(exps)}
                for exps, c in self.terms.items()
            ],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "SparsePolynomial":
        return cls.from_terms(
            payload["vars"],
            [(Fraction(t["c"]["num"], t["c"]["den"]), tuple(t["e"])) for t in payload["terms"]],
        )


def _multinomial(total: int, parts: Sequence[int]) -> int:
    return factorial(total) // prod(factorial(p) for p in parts)


def build_price_polynomial(tau: Permutation, n: int) -> SparsePolynomial:
    """q_{n,tau}: |tau|! * sum over i_1 < ... < i_k of prod x_{i_j}^l_j / l_j!"""
    if n < 1:
        raise ValueError("order n must be positive")
    layers = layer_sequence(tau)
    coef = _multinomial(len(tau), layers)
    terms = []
    for slots in itertools.combinations(range(n), len(layers)):
        exps = [0] * n
        for slot, length in zip(slots, layers):
            exps[slot] = length
        terms.append((coef, tuple(exps)))
    return SparsePolynomial.from_terms(n, terms)


def build_extended_price_polynomial(tau: Permutation, n: int) -> SparsePolynomial:
    """g_{n,tau} over 2n alternating antilayer/layer slots"""
    if n < 1:
        raise ValueError("order n must be positive")
    num_vars = 2 * n
    terms = []
    for decomposition in enumerate_quasi_blocks(tau):
        lengths = [q.length for q in decomposition]
        coef = _multinomial(len(tau), lengths)
        for slots in itertools.combinations(range(num_vars), len(lengths)):
            # 1-based slot parity must equal xi unless the quasi-block is a single point
            if all(
                q.length == 1 or (slot + 1) % 2 == q.xi for slot, q in zip(slots, decomposition)
            ):
                exps = [0] * num_vars
                for slot, length in zip(slots, lengths):
                    exps[slot] = length
                terms.append((coef, tuple(exps)))
    return SparsePolynomial.from_terms(num_vars, terms)


Builder = Callable[[Permutation, int], SparsePolynomial]

BUILDERS: Dict[str, Builder] = {
    "plain": build_price_polynomial,
    "extended": build_extended_price_polynomial,
}


def combine(f: FormalCombination, builder: Union[Builder, str], n: int) -> SparsePolynomial:
    """Coefficient-wise linear combination sum a_i * builder(tau_i, n)"""
    if isinstance(builder, str):
        builder = BUILDERS[builder]
    num_vars = 2 * n if builder is build_extended_price_polynomial else n
    total = SparsePolynomial.zero(num_vars)
    for tau, c in f:
        total = total + builder(tau, n).scale(c)
    logger.debug(f"combined polynomial over {num_vars} variables with {len(total)} terms")
    return total


def embed_plain_point(x: Sequence[Number]) -> List[Number]:
    """(x1, ..., xn) -> (0, x1, 0, x2, ..., 0, xn): every antilayer slot empty"""
    point: List[Number] = []
    for v in x:
        point.extend([0, v])
    return point


def antilayer_layer_point(y: Number, x: Sequence[Number]) -> List[Number]:
    """(y, x1, ..., xN) -> (y, x1, 0, x2, 0, ..., 0, xN): only the first antilayer slot open"""
    point: List[Number] = [y]
    for i, v in enumerate(x):
        if i > 0:
            point.append(0)
        point.append(v)
    return point


def layer_slots(n: int) -> List[int]:
    """0-based indices of the layer (even 1-based) slots of g_n"""
    return [2 * j + 1 for j in range(n)]
