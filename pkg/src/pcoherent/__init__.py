"""Desirable gambles, classical and P-coherent, with LP and SDP inference."""

from .classical import (
    AssessmentSet,
    DutchBook,
    credal_witness,
    dutch_book,
    is_coherent,
    lower_prevision,
    natural_extension_contains,
    upper_prevision,
)
from .entanglement import (
    BOX2_ANGLES,
    ChshConfig,
    bell_gap_report,
    chsh_operator,
    ppt_check,
    product_state_max,
    see_saw,
    witness_check,
    witness_from_ppt,
)
from .errors import IncoherentError, NoConvergence, NumericalFailure, UndefinedConditional
from .linalg import ProductState, eigh, eigvalsh, hermitian, partial_trace, partial_transpose
from .quantum import (
    HermitianGamble,
    QuantumAssessmentSet,
    born_probabilities,
    density_matrix,
    dual_state,
    is_p_coherent,
    lower_prevision_sdp,
    luder_condition,
    p_incoherence_certificate,
    pin_state_assessments,
    unitary_evolve,
    upper_prevision_sdp,
)
from .quasiprob import SignedCharge, box1_charge, charge_moment_matrix, fit_signed_charge, nonnegative_charge
from .sos import Poly2, gram_sos_feasible, lb_evaluate, motzkin, ze_matrix

__version__ = "0.1.0"
