"""groupcut: partition items into groups minimizing intra-group pairwise distance.

Two models are supported: prescribed group sizes, and a free number of items
per group.  The package provides a fast multi-start randomized heuristic,
exact enumeration for small instances, solution-space counting, great-circle
city instances, LP/QAPLIB exporters with a witness checker, scikit-learn
style estimators, and a command-line interface.
"""

from .core import (
    DistanceMatrix,
    FixedSizes,
    GroupSpec,
    Partition,
    VariableCount,
    canonicalize,
    insertion_cost,
    partition_cost,
    removal_gain,
    validate_partition,
)
from .estimator import ExactPartitioner, GraspPartitioner
from .exact import (
    count_fixed,
    count_variable,
    enumerate_fixed,
    enumerate_variable,
    format_scientific,
)
from .formulations import (
    check_witness,
    export_blp_fixed,
    export_blp_variable,
    export_qap,
    witness_from_partition,
)
from .geo import CityRecord, build_matrix, bundled_cities, great_circle, load_cities
from .heuristic import (
    GraspConfig,
    RandomStream,
    SolveResult,
    descent_relocate,
    descent_swap,
    greedy_fill,
    multistart,
    seed_groups,
)

__version__ = "0.1.0"

__all__ = [
    "DistanceMatrix",
    "FixedSizes",
    "GroupSpec",
    "Partition",
    "VariableCount",
    "canonicalize",
    "insertion_cost",
    "partition_cost",
    "removal_gain",
    "validate_partition",
    "CityRecord",
    "build_matrix",
    "bundled_cities",
    "great_circle",
    "load_cities",
    "GraspConfig",
    "RandomStream",
    "SolveResult",
    "descent_relocate",
    "descent_swap",
    "greedy_fill",
    "multistart",
    "seed_groups",
    "count_fixed",
    "count_variable",
    "enumerate_fixed",
    "enumerate_variable",
    "format_scientific",
    "check_witness",
    "export_blp_fixed",
    "export_blp_variable",
    "export_qap",
    "witness_from_partition",
    "GraspPartitioner",
    "ExactPartitioner",
]
