from .combination import FormalCombination, combination_density, parse_combination
from .layered import (
    Block,
    BlockSeq,
    QuasiBlock,
    QuasiBlockSeq,
    block_sequence,
    blow_up,
    count_occurrences_layered,
    enumerate_quasi_blocks,
    from_layer_sequence,
    is_layered,
    layer_sequence,
    natural_decomposition,
    parse_block_sequence,
    realize,
)
from .permutation import (
    DensityValue,
    Permutation,
    count_occurrences,
    density,
    induced_subpermutation,
    make_identity,
    make_reverse,
    parse_permutation,
)
