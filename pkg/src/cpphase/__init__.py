"""Contact processes on one-dimensional spatial random graphs.

Generators for long-range percolation, augmented Gilbert graphs,
weight-dependent random connection models, lattice Boolean models and clique
chains; exact event-driven contact-process simulation; cut-point block
decompositions and their renewal statistics; block-environment estimation
with the reflected-walk recurrence criterion; star-graph persistence
experiments; survival sweeps and bracketed critical-rate search; box-scale
renormalisation diagnostics.
"""

__version__ = "0.1.0"

from .errors import (BlockRangeError, BracketError, BudgetExceededError,
                     CpphaseError, DecompositionUnavailableError, DomainError,
                     GenerationError, InsufficientDataError, MarginError,
                     SpecError)
from .graph_core import (GraphStats, LatticeGraph, WindowedGraph, path_graph,
                         read_edge_file, star_window_graph, write_edge_file)
from .graph_models import (BooleanLatticeSpec, CliqueChainSpec, ConditionReport,
                           GilbertSpec, LrpSpec, ProductKernel, WdrcmSpec,
                           boolean_lattice_generate, clique_chain_generate,
                           generate_graph, gilbert_generate,
                           lrp_condition_check, lrp_cut_probability,
                           lrp_generate, spec_from_config, spec_to_config,
                           wdrcm_cut_condition, wdrcm_generate)
from .cut_analysis import (BlockStats, CutDecomposition, block_decomposition,
                           block_statistics, edges_above, edges_above_profile,
                           find_cut_points, find_kl_cut_points)
from .contact_process import (BatchResult, BlockProcess, SimOutcome, SimParams,
                              domination_check, extract_block_process,
                              simulate, simulate_batch, simulate_eta)
from .coupling_rwre import (EnvironmentEstimate, LedrappierResult,
                            OmegaEstimate, WalkStats, estimate_omega,
                            ledrappier_functional, omega_lower_bound,
                            pipeline_verdict, rwre_simulate)
from .star_lab import (PersistenceEstimate, StarExperimentConfig,
                       star_persist_from_K, star_persist_from_root,
                       star_survival_time_scaling, star_threshold)
from .phase_estimation import (LambdaCResult, SurvivalEstimate, SweepResult,
                               estimate_lambda_c, lambda_sweep,
                               survival_probability)
from .renorm_lab import (BoxSurvivalRow, GoodBoxField, PathExponent,
                         RenormConfig, box_survival_experiment,
                         good_box_field, infection_path_exponent)
