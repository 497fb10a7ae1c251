"""Entanglement growth in QAOA and quantum annealing circuits for MaxCut."""

__version__ = "0.1.0"

from .errors import (ConnectivityError, DomainError, InsufficientDataError, InvalidSizeError,
                     ParameterError, RankError, ShapeError, SymmetryError)
from .graphs import (Graph, avg_shortest_path, gen_complete, gen_linear, gen_regular3,
                     generate, maxcut_bruteforce)
from .simulator import (QaoaAngles, annealing_schedule, build_cost_diagonal, cost_expectation,
                        qaoa_cost, qaoa_cost_and_gradient, run_annealing, run_qaoa)
from .entanglement import (Bipartition, contiguous_bipartition, entanglement_entropy,
                           gap_ratios, marchenko_pastur_scaled, mean_gap_ratio,
                           random_bipartition, schmidt_spectrum, spectrum_blocks,
                           von_neumann_entropy)
from .optimize import minimize_multistart, minimize_single
from .experiments import ExperimentConfig, run_sweep, summarize
