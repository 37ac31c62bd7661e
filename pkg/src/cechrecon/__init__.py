"""Homology of a metric space from the intrinsic Čech filtration of a finite sample."""
from .complex import (
    FilteredComplex,
    SimplicialComplex,
    cech_complex,
    filtered_ambient_cech,
    filtered_cech,
    filtration_value,
    miniball_radius,
)
from .errors import *  # noqa: F401,F403
from .homology import (
    Bar,
    Barcode,
    PersistentImageQuery,
    betti,
    betti_numbers,
    chain_complex,
    induced_rank_oracle,
    persistence,
    persistent_image_rank,
)
from .maps import (
    DiagramReport,
    SimplicialMap,
    are_contiguous,
    check_dowker_duality,
    check_inclusion_diagram,
    check_interleaving,
    check_reverse_square,
    compose,
    inclusion,
    is_simplicial,
)
from .metric import (
    EuclideanCloud,
    FiniteMetricSpace,
    SubsetView,
    VertexMap,
    directed_hausdorff,
    is_s_approximation,
    projection_map,
)
from .recover import (
    RecoveryParams,
    RecoveryReport,
    default_params,
    nsw_reconstruct_check,
    recover_homology,
    validate_params,
)
from .svg import emit_barcode_svg

__version__ = "0.1.0"
