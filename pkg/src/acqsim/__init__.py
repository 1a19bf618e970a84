"""acqsim: a simulation laboratory for the acquaintance-time process on
(percolated) random geometric graphs.

Agents sit one per vertex; each round a matching is chosen and the agents on
its edges swap; agents on adjacent vertices are acquainted forever.  The
package generates the random graphs, compiles explicit round-by-round
strategies whose schedules certify upper bounds on the acquaintance time,
verifies them with an exact simulator, and measures how the round counts
scale against the r^-2 and r^-2 p^-1 ln n theory curves.
"""

from .bounds import (ExperimentRecord, SweepConfig, TailBound, chernoff_lower,
                     chernoff_upper, pm_probability, radius_for_regime,
                     scaling_experiment, wilson_interval)
from .errors import *  # noqa: F401,F403 - typed failures are part of the API
from .geometry import (CORNER_RULE, TOUCHING8, Dissection, GeometricGraph, Point,
                       PointSet, build_percolated_rgg, build_rgg, dissect,
                       dissect_by_m, percolate, sample_points)
from .matching import (BipartiteGraph, GridMatchingCover, grid_four_cover,
                       hall_violator, inter_cell_matchings, max_matching)
from .process import (ProcessState, SimulationResult, apply_matching,
                      brute_force_ac, brute_force_helicopter_ac,
                      enumerate_matchings, init_process, run_schedule,
                      trivial_lower_bound)
from .schedule import LocalPlan, Schedule, reverse_and_append
from .strategies import (DenseStrategy, GroupMap, PairTeamStrategy,
                         PercolatedStrategy, SparseStrategy, StrategyReport, Tree,
                         bounded_degree_spanning_tree, dense_schedule,
                         gnp_pair_schedule, grid_hamiltonian_path,
                         hamiltonian_path_schedule, lift_schedule, move_into_cell,
                         percolated_schedule, sparse_schedule, tree_walk_schedule)
from .structure import (CellGraph, Obstruction, PointClassification,
                        StructureAnalysis, StructureAnalyzer, analyze,
                        assign_and_partition, check_blocks, check_occupancy,
                        crucial_vertices, verify_properties)

__version__ = "0.1.0"
