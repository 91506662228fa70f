"""Truncation dimension and truncation-error bounds for weighted anchored spaces."""

from .dimension import (
    DimensionQuery,
    DimensionResult,
    dim_p1_polydecay,
    dim_upper_bound,
    k_eps_closed_form,
    k_eps_scan,
)
from .errors import (
    AdmissibilityError,
    DivergenceError,
    EnumerationLimitError,
    InvalidParameterError,
    ModeMismatchError,
    NoSolutionError,
    TruncDimError,
    UnsupportedModelError,
)
from .exponents import (
    ExponentConfig,
    conjugate,
    continuity_bound_Ss,
    embedding_factor,
    embedding_norm_exact_q1,
    embedding_norm_upper,
)
from .pod import pod_head_bound, pod_head_exact, pod_T, pod_tail_bound
from .series import (
    TailBracket,
    infinite_product_upper,
    stable_product_difference,
    tail_sum_poly,
)
from .truncation import (
    TailBound,
    combined_error,
    tail_bound_product,
    tail_brute_force,
    tail_exact_product,
    tail_p1,
    truncate_function,
)
from .weights import (
    PODWeights,
    PolyDecay,
    ProductWeights,
    kernel_eval,
    subset_weight,
    weight_sum,
)

__version__ = "0.1.0"
