"""Multidimensional community discovery in edge-labeled multigraphs.

Per-dimension communities become node transactions of
``(dimension, community)`` items; frequent closed itemsets over those
transactions are the multidimensional communities.
"""

__version__ = "0.1.0"

from .detect import (  # noqa: E402
    CommunityAssignment,
    CommunityDiscoverer,
    ConnectedComponents,
    FixedAssignment,
    LabelPropagation,
    connected_components,
    fixed_assignment,
    label_propagation,
)
from .fcim import ClosedItemsetMiner, ClosedPattern, brute_force_closed, is_closed, mine_closed  # noqa: E402
from .lattice import Lattice, build_lattice  # noqa: E402
from .membership import ItemCatalog, TransactionDB, build_memberships, decode  # noqa: E402
from .network import (  # noqa: E402
    MonoNetwork,
    MultidimNetwork,
    edges_among,
    load_edgelist,
    split,
    write_edgelist,
)
from .pipeline import (  # noqa: E402
    MultidimCommunity,
    MultidimCommunityMiner,
    RunConfig,
    collapse_baseline,
    compare_node_sets,
    compute_mcd,
    count_components,
    filter_communities,
    run,
    stats,
)
from .synth import PlantedGroup, SynthSpec, generate  # noqa: E402

__all__ = [
    "ClosedItemsetMiner", "ClosedPattern", "CommunityAssignment", "CommunityDiscoverer",
    "ConnectedComponents", "FixedAssignment", "ItemCatalog", "LabelPropagation", "Lattice",
    "MonoNetwork", "MultidimCommunity", "MultidimCommunityMiner", "MultidimNetwork",
    "PlantedGroup", "RunConfig", "SynthSpec", "TransactionDB", "brute_force_closed",
    "build_lattice", "build_memberships", "collapse_baseline", "compare_node_sets",
    "compute_mcd", "connected_components", "count_components", "decode", "edges_among",
    "filter_communities", "fixed_assignment", "generate", "is_closed", "label_propagation",
    "load_edgelist", "mine_closed", "run", "split", "stats", "write_edgelist",
]
