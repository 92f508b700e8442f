"""Solver workbench for increasing-stakes recursive games, specialized to
continuous Guts poker: exact payoff/stakes matrices, fictitious-play and
exact minimax solving, recursive value iteration with convergence
certificates, coalition experiments, multiplayer learning dynamics, and an
interactive human-vs-coalition bot service.
"""

from .core import (
    CoalitionIndex,
    Grid,
    GutslabError,
    InvalidDiscretizationError,
    InvalidInputError,
    InvalidProfileError,
    MixedStrategy,
    OracleScaleError,
    ResourceBudgetError,
    StakedBimatrix,
    decode_column,
    encode_column,
    make_grid,
)
from .payoff import (
    PseudoBlocProfile,
    RuleVariant,
    ThresholdProfile,
    alpha_closed,
    alpha_general,
    alpha_pseudo_bloc,
    alpha_weenie_general,
    beta_closed,
    beta_general,
    monte_carlo_alpha,
)
from .matrices import (
    build_bloc_matrices,
    build_full_matrices,
    build_pseudo_bloc_matrices,
    build_two_coalition_matrices,
)
from .solver import FPResult, MinimaxSolution, duality_gap, exact_minimax, fictitious_play
from .recursive import (
    OvershootDivergenceError,
    RecursiveGameSpec,
    RecursiveSolveResult,
    TransitionCheck,
    ValueIterationConfig,
    check_attraction_above,
    check_transition,
    geometric_bound,
    value_iteration,
)
from .coalition import (
    CoalitionSolution,
    FitFailureError,
    RationalFit,
    SolveMode,
    TwoCoalitionSolution,
    fit_rational,
    nash_threshold,
    run_table,
    solve_one_vs_n,
    solve_two_vs_two,
    verify_weenie_optimality,
)
from .dynamics import (
    GutsOneShotGame,
    MultiFPTrace,
    OddManVariant,
    SymmetricGame,
    gap_n,
    jacob_game,
    jacob_game_ii,
    jacob_game_mega,
    multiplayer_fp,
    odd_man_payoff,
    odd_man_search,
)
from .session import (
    CoalitionPolicy,
    GameSession,
    PolicyStore,
    PolicyUnavailableError,
    RoundResolution,
    SessionStateError,
    run_scripted_sessions,
)

__version__ = "0.1.0"
