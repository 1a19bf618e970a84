"""Strategy compilers: every one emits a Schedule the simulator can verify."""

from ..schedule import reverse_and_append
from .core import (GroupMap, StrategyReport, Tree, bounded_degree_spanning_tree,
                   grid_hamiltonian_path, hamiltonian_path_schedule, lift_schedule,
                   tree_walk_schedule)
from .dense import DenseStrategy, dense_schedule
from .pairteam import PairTeamStrategy, build_team_plan, gnp_pair_schedule
from .percolated import PercolatedStrategy, percolated_schedule
from .sparse import SparseStrategy, move_into_cell, sparse_schedule

__all__ = [
    "GroupMap",
    "StrategyReport",
    "Tree",
    "bounded_degree_spanning_tree",
    "grid_hamiltonian_path",
    "hamiltonian_path_schedule",
    "lift_schedule",
    "tree_walk_schedule",
    "reverse_and_append",
    "DenseStrategy",
    "dense_schedule",
    "PairTeamStrategy",
    "build_team_plan",
    "gnp_pair_schedule",
    "PercolatedStrategy",
    "percolated_schedule",
    "SparseStrategy",
    "move_into_cell",
    "sparse_schedule",
]
