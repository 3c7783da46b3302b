"""How complex-network measurements respond to growth, edge removal and rewiring.

Generators (ER, BA, GEO), the fourteen-measurement suite, perturbation
experiments, change-curve statistics, coincidence similarity networks and
similarity-based agglomerative clustering.
"""
from .coincidence import (CoincidenceParams, SimilarityNetwork, build_similarity_network,
                          coincidence, coincidence_matrix, fig2_demo, interiority,
                          multiset_jaccard)
from .config import RunConfig, load_config, validate_config
from .errors import ConfigError, DegeneracyError, NetPerturbError, NetPerturbIOError, StageError
from .experiments import (EXPERIMENTS, ExperimentConfig, SignatureMatrix, membership_table,
                          remove_random_edge, rewire_random_edge, run_experiment,
                          run_removal_experiment, run_rewiring_experiment, run_size_experiment)
from .generators import MODELS, gen_ba, gen_er, gen_geo, generate
from .graph import (Graph, all_pairs_distances, connected_components, read_edgelist,
                    ring_decomposition, write_edgelist)
from .hcluster import Dendrogram, agglomerate, dendrogram_to_newick, parse_newick
from .measurements import MEASUREMENTS, measure_all
from .pipeline import run_pipeline
from .signals import (ChangeCurve, CurveStats, Thresholds, classify_abc, curve_stats,
                      magnitude_index, mean_trajectory, normalize_curve, pearson_vs_freevar,
                      psi_index)

__version__ = "0.1.0"
