"""Optimality analysis for abs-normal programs and their MPCC counterparts."""

__version__ = "0.1.0"

from .absnormal import AbsNormalProblem, SwitchingState, evaluate_switching  # noqa: E402
from .cq import check_idkq, check_likq, check_mpcc_licq, check_mpcc_mfcq  # noqa: E402
from .errors import (ComplementarityError, EvaluationError, InfeasiblePointError,  # noqa: E402
                     KinkcheckError, ParseError, SimplexError)
from .fileformat import dump_problem, parse_problem  # noqa: E402
from .multipliers import MultiplierSet  # noqa: E402
from .policy import DEFAULT, Tolerances  # noqa: E402
from .reform import build_counterpart_mpcc, build_slack_nlp, phi, phi_inv  # noqa: E402
from .stationarity import (check_kink_stationarity, check_s_stationarity,  # noqa: E402
                           map_multipliers, solve_kink_multipliers, solve_s_multipliers)
from .analysis import analyze, run_suite  # noqa: E402

__all__ = [
    "__version__", "AbsNormalProblem", "SwitchingState", "evaluate_switching",
    "check_likq", "check_idkq", "check_mpcc_licq", "check_mpcc_mfcq",
    "KinkcheckError", "ParseError", "EvaluationError", "InfeasiblePointError",
    "ComplementarityError", "SimplexError", "parse_problem", "dump_problem",
    "MultiplierSet", "Tolerances", "DEFAULT", "build_slack_nlp", "build_counterpart_mpcc",
    "phi", "phi_inv", "check_kink_stationarity", "solve_kink_multipliers",
    "check_s_stationarity", "solve_s_multipliers", "map_multipliers", "analyze", "run_suite",
]
