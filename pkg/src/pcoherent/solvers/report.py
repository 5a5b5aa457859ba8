from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

STATUSES = ("optimal", "infeasible", "unbounded", "numerical-failure")


@dataclass
class SolveReport:
    """Outcome of an LP or SDP solve.

    ``gap`` is the absolute primal-dual objective difference at the returned
    point. ``certificate`` is a Farkas vector (infeasible) or an improving ray
    (unbounded); it is ``None`` for optimal solves.
    """

    status: str
    primal: Any
    dual: Any
    objective: float
    gap: float
    iterations: int
    dual_objective: float = np.nan
    certificate: Any = None
    primal_residual: float = np.nan
    dual_residual: float = np.nan
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"
