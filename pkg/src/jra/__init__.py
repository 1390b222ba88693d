"""Joint routing-assignment: tours alternating between items and placeholders.

Exact branch-and-cut, two-way assignment with cycle merging, partial path
reconstruction, circle-based polishing and Large-alpha refinement.
"""

from .assignment import CycleSet, hungarian, two_way_assign
from .exact import SolveOptions, SolveResult, solve, solve_large_alpha
from .instance import Instance, generate
from .kernels import BACKEND
from .merging import merge_cycles
from .pipeline import run_pipeline
from .ppr import break_tour, recover, refine_merge, solve_reduced
from .slppr import PolishConfig, polish
from .tour import Tour, cycle_path, tour_cost

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CycleSet",
    "Instance",
    "PolishConfig",
    "SolveOptions",
    "SolveResult",
    "Tour",
    "break_tour",
    "cycle_path",
    "generate",
    "hungarian",
    "merge_cycles",
    "polish",
    "recover",
    "refine_merge",
    "run_pipeline",
    "solve",
    "solve_large_alpha",
    "solve_reduced",
    "tour_cost",
    "two_way_assign",
]
