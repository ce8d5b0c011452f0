"""Exact generic root counts for sparse multilinear game systems."""

__version__ = "0.1.0"

from .numerics import (DimensionCapExceeded, RationalMatrix, permanent_naive,  # noqa: F401
                       permanent_ryser, solve_linear_exact)
from .polygraph import (CountReport, PolynomialGraph, bernstein_count,  # noqa: F401
                        has_solution, to_dot, validate_graph)
from .multilinear import MultilinearPoly, PolySystem, residual, validate_sparsity  # noqa: F401
from .normalform import (GraphicalModel, NormalFormGame, complete_polygraph,  # noqa: F401
                         graphical_polygraph, indifference_system)
from .extensive import (GameTree, backward_induction_pure, normal_form_of,  # noqa: F401
                        polynomial_graph_of, subgame_system)
from .ent import (EntNode, EntStructure, hierarchical_residual,  # noqa: F401
                  relaxed_graphical_model, relaxed_system)
from .oracles import cross_check_count  # noqa: F401
from .io import dump_game, emit_report, parse_game_file  # noqa: F401
