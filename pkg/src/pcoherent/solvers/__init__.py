"""Linear and semidefinite programming back ends."""

from .lp import LinearProgram, StandardForm, solve_lp, to_standard_form, verify_farkas
from .report import SolveReport
from .sdp import SemidefiniteProgram, solve_sdp, verify_infeasibility

__all__ = [
    "LinearProgram",
    "StandardForm",
    "SolveReport",
    "SemidefiniteProgram",
    "solve_lp",
    "solve_sdp",
    "to_standard_form",
    "verify_farkas",
    "verify_infeasibility",
]
