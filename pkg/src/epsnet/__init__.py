"""Exact net constructions and complexity measures for finite weighted
range spaces."""

from .core import (
    CapExceededError,
    InstanceError,
    PRNG_ALGORITHM,
    RangeSpace,
    TheoremViolationError,
    build_range_space,
    draw_points,
    format_rational,
    parse_rational,
    stream_rng,
)
from .complexity import (
    ComplexityProfile,
    DoublingResult,
    alexander_capacity,
    capacity_levels,
    capacity_vector,
    compute_profile,
    doubling_constant,
    projection_function,
    sauer_check,
    shallow_cell,
    star_number,
    vc_dimension,
    vc_of_masks,
)
from .packing import (
    Packing,
    greedy_packing,
    haussler_certificate,
    max_clique,
    max_packing_exact,
)
from .oneinclusion import (
    OneInclusionGraph,
    Orientation,
    OrientationInfeasibleError,
    build_oig,
    density_check,
    loo_error,
    orient_bounded,
)
from .nets import (
    DyadicDecomposition,
    NetReport,
    build_decomposition,
    cal_net,
    doubling_net,
    doubling_net_small_d,
    greedy_net,
    iid_net,
    min_net_exact,
    stratified_net,
    verify_net,
)
from .generators import (
    LowerBoundParams,
    gen_geometric,
    gen_lower_bound_family,
    gen_random,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "ComplexityProfile",
    "DoublingResult",
    "DyadicDecomposition",
    "InstanceError",
    "LowerBoundParams",
    "NetReport",
    "OneInclusionGraph",
    "Orientation",
    "OrientationInfeasibleError",
    "PRNG_ALGORITHM",
    "Packing",
    "RangeSpace",
    "TheoremViolationError",
    "alexander_capacity",
    "build_decomposition",
    "build_oig",
    "build_range_space",
    "cal_net",
    "capacity_levels",
    "capacity_vector",
    "compute_profile",
    "density_check",
    "doubling_constant",
    "doubling_net",
    "doubling_net_small_d",
    "draw_points",
    "format_rational",
    "gen_geometric",
    "gen_lower_bound_family",
    "gen_random",
    "greedy_net",
    "greedy_packing",
    "haussler_certificate",
    "iid_net",
    "loo_error",
    "max_clique",
    "max_packing_exact",
    "min_net_exact",
    "orient_bounded",
    "parse_rational",
    "projection_function",
    "sauer_check",
    "shallow_cell",
    "star_number",
    "stratified_net",
    "stream_rng",
    "vc_dimension",
    "vc_of_masks",
    "verify_net",
]
