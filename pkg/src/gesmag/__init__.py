"""Score-based learning of maximal ancestral graphs.

Scores Markov equivalence classes with imsets built from conditional
independence lists and empirical Gaussian entropy, and searches MEC space
with PAG-level add/delete/turn moves.  Includes a linear Gaussian
simulator and an evaluation harness (structural metrics and RICF-based
BIC comparison).
"""

__version__ = "0.1.0"

from .errors import (
    CycleError,
    DegenerateDataError,
    DomainError,
    GesmagError,
    GraphKindError,
    InsufficientSampleError,
    InvalidMecError,
)
from .graph import (
    ARROW,
    CIRCLE,
    TAIL,
    MixedGraph,
    directify_undirected,
    districts,
    format_graph,
    induced_subgraph,
    is_ancestral,
    is_maximal,
    m_separated,
    parse_graph,
    project_to_mag,
    relations,
    topological_order,
)
from .heads import (
    barren,
    enumerate_heads,
    markov_equivalent,
    max_head_size,
    parametrizing_set,
    restricted_parametrizing_set,
    tail,
)
from .imset import (
    EntropyCache,
    Imset,
    ScoreReport,
    entropy_from_covariance,
    imset_from_ci_list,
    inner_product,
    model_dimension,
    score_mag,
    semi_elementary_imset,
)
from .markov import (
    CIStatement,
    ceiling,
    ci_from_marginalization,
    complete_power_dag,
    hamlet,
    marginalize_head,
    markov_blanket,
    ordered_local_markov_property,
    pairwise_markov_property,
    refined_markov_property,
    refined_power_dag,
)
from .moves import add_adjacency, delete_adjacency, turning_moves, uc_triples_add, uc_triples_delete
from .pag import (
    count_discriminating_paths,
    find_discriminating_paths,
    mag_to_pag,
    pag_from_parametrizing_set,
    pag_to_mag,
)
from .search import SearchConfig, SearchResult, complexity_probe, gesmag
from .simulate import LinearGaussianSEM, random_admg, sample_data, sem_from_graph
from .evaluate import (
    GaussianFit,
    bic,
    bic_diff,
    edge_mark_accuracy,
    edge_type_rates,
    metric_report,
    ricf_fit,
)
