"""Entropies and mutual informations of quantized hypercube sources over
binary symmetric and mixture channels, with numerical certification of the
extremal inequalities that govern them."""

from .core import (
    MAX_DIMENSION,
    BscChannel,
    BudgetExceededError,
    CheckReport,
    Pmf,
    VertexSet,
    binary_entropy,
    canonical_form,
    channel_kernel,
    entropy,
    is_monotone,
    noise_transform,
    permute_coordinates,
    star,
    uniform_pmf_on,
    xor_translate,
)
from .subsets import (
    DEFAULT_ALPHA_GRID,
    MinEntropyResult,
    MonotoneSetFamily,
    check_min_entropy_monotonicity,
    check_mixture_lower_bound,
    enumerate_monotone_sets,
    min_entropy_bruteforce,
    min_entropy_closed_form,
    min_entropy_monotone,
    min_entropy_size3_lower_bound,
    noisy_subset_entropy,
    size3_mixture_margin,
    size3_mixture_margin_derivative,
)
from .shifting import (
    BiasDecomposition,
    ShiftStep,
    bias_check,
    check_entropy_nonincrease,
    shift_coordinate,
    shift_to_monotone,
)
from .quantize import (
    ChainTrace,
    PartitionSearchResult,
    Quantizer,
    RandomSearchResult,
    SizeProfile,
    batch_mutual_information,
    cell_count_identity,
    conditional_output_entropy,
    entropy_chain_trace,
    exhaustive_partition_search,
    mutual_information,
    projection_quantizer,
    quantizer_mi_bound,
    random_quantizer_search,
    repair_empty_cells,
    size_profile,
)
from .bms import (
    BmsChannel,
    bms_mutual_information,
    capacity,
    check_least_capable,
    load_channel,
    matched_bsc,
)

__all__ = [
    "MAX_DIMENSION",
    "BscChannel",
    "BudgetExceededError",
    "CheckReport",
    "Pmf",
    "VertexSet",
    "binary_entropy",
    "canonical_form",
    "channel_kernel",
    "entropy",
    "is_monotone",
    "noise_transform",
    "permute_coordinates",
    "star",
    "uniform_pmf_on",
    "xor_translate",
    "DEFAULT_ALPHA_GRID",
    "MinEntropyResult",
    "MonotoneSetFamily",
    "check_min_entropy_monotonicity",
    "check_mixture_lower_bound",
    "enumerate_monotone_sets",
    "min_entropy_bruteforce",
    "min_entropy_closed_form",
    "min_entropy_monotone",
    "min_entropy_size3_lower_bound",
    "noisy_subset_entropy",
    "size3_mixture_margin",
    "size3_mixture_margin_derivative",
    "BiasDecomposition",
    "ShiftStep",
    "bias_check",
    "check_entropy_nonincrease",
    "shift_coordinate",
    "shift_to_monotone",
    "ChainTrace",
    "PartitionSearchResult",
    "Quantizer",
    "RandomSearchResult",
    "SizeProfile",
    "batch_mutual_information",
    "cell_count_identity",
    "conditional_output_entropy",
    "entropy_chain_trace",
    "exhaustive_partition_search",
    "mutual_information",
    "projection_quantizer",
    "quantizer_mi_bound",
    "random_quantizer_search",
    "repair_empty_cells",
    "size_profile",
    "BmsChannel",
    "bms_mutual_information",
    "capacity",
    "check_least_capable",
    "load_channel",
    "matched_bsc",
]

__version__ = "0.1.0"
