# services/pattern-packing/src/permpack/core/layered.py
"""Layered permutations: layer, block and quasi-block decompositions.

A layered permutation is an increasing sequence of decreasing runs of
consecutive values (layers). Blocks merge maximal runs of length-1 layers
into antilayers; quasi-block decompositions further split antilayers into
antilayeroids.
"""
from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass
from math import comb, prod
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from ..config import get_settings
from ..errors import CapExceededError, NotLayeredError, ParseError
from .permutation import Permutation

logger = logging.getLogger(__name__)

LayerSeq = Tuple[int, ...]


class Block(NamedTuple):
    length: int
    is_antilayer: bool


class QuasiBlock(NamedTuple):
    length: int
    xi: int


def _format_item(length: int, anti: bool) -> str:
    return f"^{length}" if anti else str(length)


@dataclass(frozen=True)
class BlockSeq:
    """Block decomposition; antilayers are maximal and layer blocks have length >= 2"""

    blocks: Tuple[Block, ...]

    def __post_init__(self) -> None:
        blocks = tuple(Block(int(length), bool(anti)) for length, anti in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        for i, block in enumerate(blocks):
            if block.length < 1:
                raise ValueError(f"block {i + 1} has non-positive length {block.length}")
            if not block.is_antilayer and block.length < 2:
                raise ValueError(f"layer block {i + 1} must have length >= 2")
            if block.is_antilayer and i > 0 and blocks[i - 1].is_antilayer:
                raise ValueError(f"blocks {i} and {i + 1} are consecutive antilayers")

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def size(self) -> int:
        return sum(b.length for b in self.blocks)

    @property
    def antilayers(self) -> List[int]:
        return [b.length for b in self.blocks if b.is_antilayer]

    @property
    def layers(self) -> List[int]:
        return [b.length for b in self.blocks if not b.is_antilayer]

    def __str__(self) -> str:
        return " ".join(_format_item(b.length, b.is_antilayer) for b in self.blocks)

    def to_json(self) -> List[dict]:
        return [{"len": b.length, "anti": b.is_antilayer} for b in self.blocks]


@dataclass(frozen=True)
class QuasiBlockSeq:
    """One element of the set of quasi-block decompositions of a layered permutation"""

    items: Tuple[QuasiBlock, ...]

    def __post_init__(self) -> None:
        items = tuple(QuasiBlock(int(length), int(xi)) for length, xi in self.items)
        object.__setattr__(self, "items", items)
        for item in items:
            if item.length < 1 or item.xi not in (0, 1):
                raise ValueError(f"invalid quasi-block {item}")
            if item.xi == 0 and item.length < 2:
                raise ValueError("a layer quasi-block must have length >= 2")

    def __iter__(self) -> Iterator[QuasiBlock]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    @property
    def size(self) -> int:
        return sum(q.length for q in self.items)

    def __str__(self) -> str:
        return "(" + ", ".join(_format_item(q.length, q.xi == 1) for q in self.items) + ")"

    def to_json(self) -> List[dict]:
        return [{"len": q.length, "anti": q.xi == 1} for q in self.items]


def layer_sequence(sigma: Permutation) -> LayerSeq:
    """Unique layer decomposition; raises NotLayeredError when sigma is not layered"""
    word = sigma.word
    layers: List[int] = []
    pos, low = 0, 1
    while pos < len(word):
        top = word[pos]
        length = top - low + 1
        if length < 1 or word[pos : pos + length] != tuple(range(top, low - 1, -1)):
            raise NotLayeredError(f"{sigma} is not layered (fails at position {pos + 1})")
        layers.append(length)
        pos += length
        low = top + 1
    return tuple(layers)


def is_layered(sigma: Permutation) -> bool:
    try:
        layer_sequence(sigma)
    except NotLayeredError:
        return False
    return True


def from_layer_sequence(lengths: Sequence[int]) -> Permutation:
    word: List[int] = []
    low = 1
    for length in lengths:
        if length < 1:
            raise ValueError(f"layer lengths must be positive: {list(lengths)}")
        word.extend(range(low + length - 1, low - 1, -1))
        low += length
    return Permutation(tuple(word))


def blocks_from_layers(lengths: Sequence[int]) -> BlockSeq:
    blocks: List[Block] = []
    for length in lengths:
        if length == 1:
            if blocks and blocks[-1].is_antilayer:
                blocks[-1] = Block(blocks[-1].length + 1, True)
            else:
                blocks.append(Block(1, True))
        else:
            blocks.append(Block(length, False))
    return BlockSeq(tuple(blocks))


def layers_from_blocks(blocks: Union[BlockSeq, Sequence[Tuple[int, bool]]]) -> LayerSeq:
    lengths: List[int] = []
    for length, anti in blocks:
        if anti:
            lengths.extend([1] * length)
        elif length > 0:
            lengths.append(length)
    return tuple(lengths)


def block_sequence(sigma: Permutation) -> BlockSeq:
    return blocks_from_layers(layer_sequence(sigma))


def realize(blocks: Union[BlockSeq, Sequence[Tuple[int, bool]]]) -> Permutation:
    """Layered permutation with the given blocks"""
    return from_layer_sequence(layers_from_blocks(blocks))


def reverse_blocks(blocks: BlockSeq) -> BlockSeq:
    """Blocks of the reverse-complement, which has the same packing behaviour"""
    return BlockSeq(tuple(reversed(blocks.blocks)))


def parse_block_sequence(text: str) -> BlockSeq:
    """Parse "3 ^2 2 ^2" (whitespace or commas; ^ marks an antilayer)"""
    tokens = [t for t in re.split(r"[\s,]+", text.strip().strip("()")) if t]
    if not tokens:
        raise ParseError("empty block sequence")
    blocks: List[Block] = []
    for token in tokens:
        anti = token.startswith("^")
        digits = token[1:] if anti else token
        if not digits.isdigit():
            raise ParseError(f"cannot parse block {token!r} in {text!r}")
        blocks.append(Block(int(digits), anti))
    try:
        return BlockSeq(tuple(blocks))
    except ValueError as e:
        raise ParseError(f"invalid block sequence {text!r}: {e}") from e


def compositions(n: int) -> Iterator[Tuple[int, ...]]:
    """All compositions of n, coarsest first: (n), (n-1, 1), ..., (1, ..., 1)"""
    if n == 0:
        yield ()
        return
    for first in range(n, 0, -1):
        for rest in compositions(n - first):
            yield (first,) + rest


def layered_permutations(n: int) -> Iterator[Permutation]:
    """All 2^(n-1) layered permutations of length n, one per composition"""
    for lengths in compositions(n):
        yield from_layer_sequence(lengths)


def enumerate_quasi_blocks(sigma: Permutation, cap: Optional[int] = None) -> List[QuasiBlockSeq]:
    """All quasi-block decompositions: every antilayer split into antilayeroids"""
    blocks = block_sequence(sigma)
    cap = cap if cap is not None else get_settings().qblock_cap
    total = prod(2 ** (a - 1) for a in blocks.antilayers)
    if total > cap:
        raise CapExceededError(f"{sigma} has {total} quasi-block decompositions (cap {cap})")

    choices: List[List[Tuple[QuasiBlock, ...]]] = []
    for block in blocks:
        if block.is_antilayer:
            choices.append(
                [tuple(QuasiBlock(p, 1) for p in parts) for parts in compositions(block.length)]
            )
        else:
            choices.append([(QuasiBlock(block.length, 0),)])
    return [
        QuasiBlockSeq(tuple(itertools.chain.from_iterable(pick)))
        for pick in itertools.product(*choices)
    ]


def natural_decomposition(positions: Sequence[int], sigma: Permutation) -> QuasiBlockSeq:
    """Quasi-block decomposition of sigma[A] grouping A by the blocks of sigma"""
    n = len(sigma)
    if not positions:
        raise ValueError("occurrence set must be non-empty")
    if any(b <= a for a, b in zip(positions, positions[1:])):
        raise ValueError(f"positions must be strictly increasing: {list(positions)}")
    if positions[0] < 1 or positions[-1] > n:
        raise IndexError(f"positions out of range for length {n}")

    items: List[QuasiBlock] = []
    start = 1
    cursor = 0
    for block in block_sequence(sigma):
        end = start + block.length
        hits = 0
        while cursor < len(positions) and positions[cursor] < end:
            hits += 1
            cursor += 1
        if hits:
            items.append(QuasiBlock(hits, 1 if block.is_antilayer or hits == 1 else 0))
        start = end
    return QuasiBlockSeq(tuple(items))


def scale_blocks(blocks: Sequence[Tuple[int, bool]], m: int) -> List[Block]:
    """Multiply every block length by m and drop zero-length entries"""
    if m < 1:
        raise ValueError("blow-up factor must be positive")
    return [Block(length * m, bool(anti)) for length, anti in blocks if length > 0]


def alternating_blocks(counts: Sequence[int]) -> List[Block]:
    """(b1, b2, ..., b2n) -> (^b1, b2, ^b3, b4, ...): odd slots are antilayers"""
    return [Block(c, i % 2 == 0) for i, c in enumerate(counts)]


def blow_up(blocks: Union[BlockSeq, Sequence[Tuple[int, bool]]], m: int) -> Permutation:
    """Layered permutation whose blocks are the given blocks scaled by m (zeros dropped)"""
    return realize(scale_blocks(list(blocks), m))


def _compatible(q: QuasiBlock, block: Block) -> bool:
    if q.length == 1:
        return True
    return block.is_antilayer == (q.xi == 1)


def count_occurrences_layered(
    tau: Permutation, blocks: Union[BlockSeq, Sequence[Tuple[int, bool]]]
) -> int:
    """Lambda(tau, sigma_b) from the block lengths of sigma_b alone.

    Sums, over quasi-block decompositions of tau and strictly increasing
    assignments of quasi-blocks to blocks, the product of binomials
    C(block length, quasi-block length). Zero-length blocks are ignored.
    """
    slots = [Block(length, bool(anti)) for length, anti in blocks if length > 0]
    if len(tau) == 0:
        return 1
    total = 0
    for decomposition in enumerate_quasi_blocks(tau):
        k = len(decomposition)
        if k > len(slots):
            continue
        # ways[j] = weighted number of placements of the first j quasi-blocks
        ways = [1] + [0] * k
        for block in slots:
            for j in range(k, 0, -1):
                q = decomposition.items[j - 1]
                if ways[j - 1] and _compatible(q, block):
                    ways[j] += ways[j - 1] * comb(block.length, q.length)
        total += ways[k]
    return total
