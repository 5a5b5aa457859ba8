"""Desirable gambles on a finite possibility space.

Every query is one small linear program:

* coherence asks whether some ``lam >= 0`` makes ``sum(lam_i g_i) <= -1``
  pointwise (a Dutch book);
* the lower prevision of ``f`` is ``max gamma`` such that
  ``f - gamma - sum(lam_i g_i) >= 0`` with ``lam >= 0``;
* its LP dual is the minimum expectation of ``f`` over the credal set
  ``{p pmf : E_p[g_i] >= 0}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import IncoherentError, NumericalFailure
from .solvers import LinearProgram, SolveReport, solve_lp

CREDAL_TOL = 1e-10


def gamble(values) -> np.ndarray:
    """A finite real vector with one entry per outcome."""
    g = np.array(values, dtype=float).ravel()
    if g.size == 0 or not np.all(np.isfinite(g)):
        raise ValueError("a gamble needs at least one finite value")
    g.setflags(write=False)
    return g


@dataclass(frozen=True)
class DutchBook:
    """Nonnegative stakes on assessed gambles whose sum loses everywhere."""

    coefficients: np.ndarray
    combined: np.ndarray

    @property
    def sure_loss(self) -> float:
        """The guaranteed loss, ``-max(combined)`` (positive for a real book)."""
        return -float(self.combined.max())


@dataclass(frozen=True)
class CredalWitness:
    pmf: np.ndarray


@dataclass(frozen=True)
class AssessmentSet:
    """A finite list of gambles judged desirable on ``omega_size`` outcomes."""

    gambles: tuple
    omega_size: int
    labels: tuple = field(default=())

    def __init__(self, gambles: Sequence = (), omega_size: int | None = None, labels: Sequence[str] = ()):
        gs = tuple(gamble(g) for g in gambles)
        if omega_size is None:
            if not gs:
                raise ValueError("omega_size is required for an empty assessment set")
            omega_size = gs[0].size
        omega_size = int(omega_size)
        if omega_size < 1:
            raise ValueError("omega_size must be positive")
        for g in gs:
            if g.size != omega_size:
                raise ValueError(f"gamble of length {g.size} on a space of {omega_size} outcomes")
        labels = tuple(labels) or tuple(f"ω{i + 1}" for i in range(omega_size))
        if len(labels) != omega_size:
            raise ValueError("one label per outcome")
        object.__setattr__(self, "gambles", gs)
        object.__setattr__(self, "omega_size", omega_size)
        object.__setattr__(self, "labels", labels)

    @property
    def matrix(self) -> np.ndarray:
        """Outcomes by gambles."""
        if not self.gambles:
            return np.zeros((self.omega_size, 0))
        return np.column_stack(self.gambles)

    def with_gamble(self, g) -> "AssessmentSet":
        return AssessmentSet(self.gambles + (gamble(g),), self.omega_size, self.labels)

    @cached_property
    def dutch_book(self) -> DutchBook | None:
        return _find_dutch_book(self)

    @property
    def is_coherent(self) -> bool:
        return self.dutch_book is None


def _check(report: SolveReport, what: str) -> SolveReport:
    if report.status == "numerical-failure":
        raise NumericalFailure(f"{what}: LP solver failed")
    return report


def _find_dutch_book(a: AssessmentSet) -> DutchBook | None:
    G = a.matrix
    k = G.shape[1]
    if k == 0:
        return None
    # smallest total stake with sum(lam_i g_i) <= -1
    rep = _check(solve_lp(LinearProgram(c=np.ones(k), A_ub=G, b_ub=-np.ones(a.omega_size))), "coherence")
    if rep.status == "infeasible":
        return None
    lam = np.maximum(rep.primal, 0.0)
    lam = lam / lam.max()  # unit largest stake
    combined = G @ lam
    if not combined.max() < 0:
        raise NumericalFailure("coherence: Dutch book failed verification")
    return DutchBook(lam, combined)


def is_coherent(a: AssessmentSet) -> bool:
    """True iff no nonnegative combination of the assessments is uniformly negative."""
    return a.is_coherent


def dutch_book(a: AssessmentSet) -> DutchBook | None:
    """A verified Dutch book, or ``None`` when ``a`` is coherent."""
    return a.dutch_book


def _require_coherent(a: AssessmentSet):
    if not a.is_coherent:
        raise IncoherentError(certificate=a.dutch_book)


def _as_query(a: AssessmentSet, f) -> np.ndarray:
    f = gamble(f)
    if f.size != a.omega_size:
        raise ValueError(f"gamble of length {f.size} on a space of {a.omega_size} outcomes")
    return f


def natural_extension_contains(a: AssessmentSet, f) -> bool:
    """True iff ``f`` dominates some nonnegative combination of the assessments."""
    _require_coherent(a)
    f = _as_query(a, f)
    G = a.matrix
    if G.shape[1] == 0:
        return bool(np.all(f >= 0))
    rep = _check(solve_lp(LinearProgram(c=np.zeros(G.shape[1]), A_ub=G, b_ub=f)), "natural extension")
    return rep.status == "optimal"


@dataclass(frozen=True)
class PrevisionResult:
    value: float
    coefficients: np.ndarray  # stakes lam on the assessments
    pmf: np.ndarray  # minimizing element of the credal set
    report: SolveReport


def solve_lower_prevision(a: AssessmentSet, f) -> PrevisionResult:
    """Lower prevision with its stakes and the dual (credal) pmf."""
    _require_coherent(a)
    f = _as_query(a, f)
    G = a.matrix
    N, k = G.shape
    c = np.zeros(k + 1)
    c[0] = 1.0
    A = np.hstack([np.ones((N, 1)), G])
    lb = np.zeros(k + 1)
    lb[0] = -np.inf
    rep = _check(solve_lp(LinearProgram(c=c, A_ub=A, b_ub=f, lb=lb, sense="max")), "lower prevision")
    if rep.status != "optimal":
        raise NumericalFailure(f"lower prevision: unexpected LP status {rep.status}")
    # standard-form rows are the N outcome constraints; their multipliers are -p
    p = np.maximum(-rep.dual[:N], 0.0)
    return PrevisionResult(rep.objective, rep.primal[1:], p, rep)


def lower_prevision(a: AssessmentSet, f) -> float:
    """Supremum buying price of ``f`` given the coherent assessments ``a``."""
    return solve_lower_prevision(a, f).value


def upper_prevision(a: AssessmentSet, f) -> float:
    """Infimum selling price, ``-lower_prevision(a, -f)``."""
    return -lower_prevision(a, -_as_query(a, f))


def credal_witness(a: AssessmentSet) -> CredalWitness:
    """One pmf under which every assessed gamble has nonnegative expectation."""
    _require_coherent(a)
    G = a.matrix
    N, k = G.shape
    rep = _check(
        solve_lp(
            LinearProgram(
                c=np.zeros(N),
                A_eq=np.ones((1, N)),
                b_eq=[1.0],
                A_ub=-G.T if k else None,
                b_ub=np.zeros(k) if k else None,
            )
        ),
        "credal set",
    )
    if rep.status != "optimal":
        raise NumericalFailure("credal set is empty although the assessments are coherent")
    p = np.maximum(rep.primal, 0.0)
    p = p / p.sum()
    if k and (G.T @ p).min() < -CREDAL_TOL:
        raise NumericalFailure("credal witness failed verification")
    return CredalWitness(p)
