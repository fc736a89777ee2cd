"""Belief-network structure recovery under latent confounding.

The package recovers directed-graph structure from conditional-independence
information when hidden common causes may be present, restricting every test
to conditioning sets of size at most k.  Alongside the learner it ships the
ground-truth constructions and verification suites used to check the
method's guarantees as executable properties.
"""

from .algorithm import (
    FrkciResult,
    TraceEvent,
    ci_reference,
    extract_dag,
    finalize_orientations,
    find_definite_discriminating_path,
    fr_k_ci,
    insert_hidden,
    orient_colliders,
    orientation_closure,
    serialize_trace,
    skeleton_phase,
)
from .bayesnet import (
    DiscreteBayesNet,
    forward_sample,
    load_alarm,
    load_network,
    load_network_file,
    random_latent_dag,
    random_parameters,
    save_network,
    save_network_file,
)
from .dsep import active_trail_exists_bruteforce, d_connected_nodes, d_separated
from .errors import DataError, FrciError, InvariantError, MarkConflictError
from .graph import (
    ARROW,
    CIRCLE,
    TAIL,
    Dag,
    Mark,
    MixedGraph,
    SepsetTable,
    has_directed_path,
    is_collider,
    legally_removable,
)
from .independence import (
    Dataset,
    GSquaredOracle,
    GSquaredResult,
    OracleStats,
    PerfectOracle,
    g_squared,
    g_squared_test,
)
from .ipg import RkIpg, build_fhg, build_including_path_graph, build_rk_ipg, rk_skeleton
from .verify import compare_skeletons, independencies_agree_up_to_k, soundness_unrestricted

__version__ = "0.1.0"

__all__ = [
    "ARROW",
    "CIRCLE",
    "TAIL",
    "Dag",
    "DataError",
    "Dataset",
    "DiscreteBayesNet",
    "FrciError",
    "FrkciResult",
    "GSquaredOracle",
    "GSquaredResult",
    "InvariantError",
    "Mark",
    "MarkConflictError",
    "MixedGraph",
    "OracleStats",
    "PerfectOracle",
    "RkIpg",
    "SepsetTable",
    "TraceEvent",
    "active_trail_exists_bruteforce",
    "build_fhg",
    "build_including_path_graph",
    "build_rk_ipg",
    "ci_reference",
    "compare_skeletons",
    "d_connected_nodes",
    "d_separated",
    "extract_dag",
    "finalize_orientations",
    "find_definite_discriminating_path",
    "forward_sample",
    "fr_k_ci",
    "g_squared",
    "g_squared_test",
    "has_directed_path",
    "independencies_agree_up_to_k",
    "insert_hidden",
    "is_collider",
    "legally_removable",
    "load_alarm",
    "load_network",
    "load_network_file",
    "orient_colliders",
    "orientation_closure",
    "random_latent_dag",
    "random_parameters",
    "rk_skeleton",
    "save_network",
    "save_network_file",
    "serialize_trace",
    "skeleton_phase",
    "soundness_unrestricted",
]
