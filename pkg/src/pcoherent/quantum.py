"""P-coherent desirable gambles on Hermitian matrices.

A gamble on a composite system with subsystem dimensions ``dims`` is a
Hermitian matrix ``G`` of size ``prod(dims)``, evaluated on product states as
``(x_1 ⊗ ... ⊗ x_m)^H G (x_1 ⊗ ... ⊗ x_m)``. Tautologies are the PSD matrices
and contradictions the negative definite ones, so coherence and previsions
are small semidefinite programs rather than NP-hard polynomial problems.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import linalg
from .errors import IncoherentError, NumericalFailure, UndefinedConditional
from .solvers import SemidefiniteProgram, SolveReport, solve_sdp

log = logging.getLogger(__name__)

STATE_TOL = 1e-9
DUALITY_TOL = 1e-7
COHERENCE_TOL = 1e-7
PROB_TOL = 1e-12


def system_shape(dims) -> tuple:
    dims = tuple(int(d) for d in np.atleast_1d(dims))
    if not dims or any(d < 2 for d in dims):
        raise ValueError(f"subsystem dimensions must all be at least 2, got {dims}")
    return dims


@dataclass(frozen=True)
class HermitianGamble:
    """A Hermitian matrix ``G`` together with the subsystem dimensions it acts on."""

    G: np.ndarray
    dims: tuple

    def __init__(self, G, dims=None):
        G = linalg.hermitian(G)
        dims = system_shape(G.shape[0] if dims is None else dims)
        if int(np.prod(dims)) != G.shape[0]:
            raise ValueError(f"matrix of size {G.shape[0]} does not match dims {dims}")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return self.G.shape[0]

    def __call__(self, *factors) -> float:
        return linalg.qform(self.G, linalg.ProductState(factors))

    def __neg__(self):
        return HermitianGamble(-self.G, self.dims)

    def shift(self, c: float) -> "HermitianGamble":
        """``G - c I``."""
        return HermitianGamble(self.G - c * np.eye(self.n), self.dims)


def _as_gamble(g, dims=None) -> HermitianGamble:
    if isinstance(g, HermitianGamble):
        return g
    return HermitianGamble(g, dims)


def density_matrix(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Validate a PSD, unit-trace Hermitian matrix."""
    rho = linalg.hermitian(rho)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
    if not linalg.is_psd(rho, tol):
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def projective_measurement(projectors: Sequence, tol: float = 1e-9) -> tuple:
    """Validate a complete set of orthogonal projectors."""
    ps = [linalg.hermitian(p) for p in projectors]
    if not ps:
        raise ValueError("a measurement needs at least one projector")
    n = ps[0].shape[0]
    total = np.zeros((n, n), dtype=complex)
    for i, p in enumerate(ps):
        if p.shape != (n, n):
            raise ValueError("projectors must share one dimension")
        if np.abs(p @ p - p).max() > tol:
            raise ValueError(f"element {i} is not idempotent")
        for q in ps[:i]:
            if np.abs(p @ q).max() > tol:
                raise ValueError("projectors are not mutually orthogonal")
        total += p
    if np.abs(total - np.eye(n)).max() > tol:
        raise ValueError("projectors do not sum to the identity")
    return tuple(ps)


def sigma_class(g, tol: float | None = None) -> str:
    """``"p_nonnegative"`` (PSD), ``"p_negative"`` (negative definite) or ``"indefinite-region"``."""
    G = _as_gamble(g).G
    if linalg.is_psd(G, tol):
        return "p_nonnegative"
    if linalg.is_nd(G, tol):
        return "p_negative"
    return "indefinite-region"


@dataclass(frozen=True)
class PIncoherence:
    """Certificate ``-I = sum(lam_i G_i) + M`` with ``lam >= 0`` and ``M`` PSD."""

    lam: np.ndarray
    M: np.ndarray


@dataclass(frozen=True)
class _CoherenceSolve:
    tau: float
    certificate: PIncoherence | None
    state: np.ndarray | None
    report: SolveReport


@dataclass(frozen=True)
class QuantumAssessmentSet:
    gambles: tuple
    dims: tuple

    def __init__(self, gambles: Sequence = (), dims=None):
        gs = [g for g in gambles]
        if dims is None:
            if not gs:
                raise ValueError("dims are required for an empty assessment set")
            first = gs[0]
            dims = first.dims if isinstance(first, HermitianGamble) else np.asarray(first).shape[0]
        dims = system_shape(dims)
        out = []
        for g in gs:
            g = _as_gamble(g, dims)
            if g.dims != dims:
                raise ValueError(f"gamble dims {g.dims} differ from {dims}")
            out.append(g)
        object.__setattr__(self, "gambles", tuple(out))
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self):
        return len(self.gambles)

    def with_gamble(self, g) -> "QuantumAssessmentSet":
        return QuantumAssessmentSet(self.gambles + (_as_gamble(g, self.dims),), self.dims)

    @cached_property
    def _coherence(self) -> _CoherenceSolve:
        return _solve_coherence(self)

    @property
    def certificate(self) -> PIncoherence | None:
        return self._coherence.certificate

    @property
    def is_p_coherent(self) -> bool:
        return self._coherence.certificate is None


def _solve_coherence(a: QuantumAssessmentSet) -> _CoherenceSolve:
    # max t  s.t.  -sum(lam_i Ghat_i) - t I >= 0,  lam >= 0,  sum(lam) <= 1
    n, k = a.n, len(a)
    norms = np.array([max(linalg.spectral_norm(g.G), 1e-300) for g in a.gambles])
    Ghat = [g.G / s for g, s in zip(a.gambles, norms)]
    blocks = [(n, "psd"), (k + 1, "nonneg")]
    C = [np.zeros((n, n)), np.eye(k + 1)[-1]]
    A = [[np.eye(n), np.zeros(k + 1)]]
    for i in range(k):
        v = np.zeros(k + 1)
        v[i] = -1.0
        v[-1] = 1.0
        A.append([Ghat[i], v])
    b = np.zeros(k + 1)
    b[0] = 1.0
    rep = solve_sdp(SemidefiniteProgram(blocks, C, A, b), gap_tol=1e-10)
    if rep.status != "optimal":
        raise NumericalFailure(f"P-coherence SDP ended with status {rep.status}")
    tau = float(rep.dual[0])
    log.debug("P-coherence margin %.3e after %d iterations", tau, rep.iterations)
    if tau > COHERENCE_TOL:
        lam = np.maximum(rep.dual[1:], 0.0) / (tau * norms)
        M = linalg.hermitian(-np.eye(n) - sum((l * g.G for l, g in zip(lam, a.gambles)), np.zeros((n, n))))
        if linalg.eigvalsh(M)[0] < -1e-7 * max(1.0, linalg.spectral_norm(M)):
            raise NumericalFailure("P-incoherence certificate failed verification")
        return _CoherenceSolve(tau, PIncoherence(lam, M), None, rep)
    return _CoherenceSolve(tau, None, rep.primal[0], rep)


def is_p_coherent(a: QuantumAssessmentSet) -> bool:
    """True iff ``-I`` is not a nonnegative combination of assessments plus a PSD matrix."""
    return a.is_p_coherent


def p_incoherence_certificate(a: QuantumAssessmentSet) -> PIncoherence | None:
    return a.certificate


def _require_coherent(a: QuantumAssessmentSet):
    if not a.is_p_coherent:
        raise IncoherentError(certificate=a.certificate)


def _clean_state(X) -> np.ndarray:
    w, V = linalg.eigh(X)
    w = np.maximum(w, 0.0)
    rho = (V * w) @ V.conj().T
    return linalg.hermitian(rho / w.sum())


def dual_state(a: QuantumAssessmentSet) -> np.ndarray:
    """A density matrix giving every assessed gamble nonnegative expectation."""
    _require_coherent(a)
    rho = _clean_state(a._coherence.state)
    worst = min((float(np.trace(g.G @ rho).real) for g in a.gambles), default=0.0)
    if worst < -STATE_TOL * max([1.0] + [linalg.spectral_norm(g.G) for g in a.gambles]):
        raise NumericalFailure(f"dual state violates an assessment by {-worst:.3e}")
    return rho


@dataclass(frozen=True)
class PrevisionReport:
    """Lower prevision with both sides of the duality on display.

    ``value`` is the certified price ``gamma`` (dual side), ``primal_value`` is
    ``Tr(F rho)`` at the returned state ``rho``; ``lam`` are the stakes.
    """

    value: float
    primal_value: float
    gap: float
    lam: np.ndarray
    rho: np.ndarray
    solve: SolveReport

    @property
    def duality_ok(self) -> bool:
        return self.gap <= DUALITY_TOL


def solve_lower_prevision(a: QuantumAssessmentSet, f) -> PrevisionReport:
    """Sup ``gamma`` with ``F - gamma I - sum(lam_i G_i)`` PSD and ``lam >= 0``."""
    _require_coherent(a)
    F = _as_gamble(f, a.dims)
    if F.dims != a.dims:
        raise ValueError(f"query dims {F.dims} differ from {a.dims}")
    n, k = a.n, len(a)
    blocks = [(n, "psd")]
    C = [F.G]
    A = [[np.eye(n)]]
    if k:
        blocks.append((k, "nonneg"))
        C.append(np.zeros(k))
        A[0].append(np.zeros(k))
        for i, g in enumerate(a.gambles):
            A.append([g.G, -np.eye(k)[i]])
    b = np.zeros(k + 1)
    b[0] = 1.0
    rep = solve_sdp(SemidefiniteProgram(blocks, C, A, b))
    if rep.status != "optimal":
        raise NumericalFailure(f"prevision SDP ended with status {rep.status}")
    gamma = float(rep.dual[0])
    rho = rep.primal[0]
    primal = float(np.trace(F.G @ rho).real)
    out = PrevisionReport(gamma, primal, abs(primal - gamma), rep.dual[1:].copy(), rho, rep)
    if not out.duality_ok:
        raise NumericalFailure(f"prevision duality gap {out.gap:.3e} exceeds {DUALITY_TOL}")
    return out


def lower_prevision_sdp(a: QuantumAssessmentSet, f) -> float:
    return solve_lower_prevision(a, f).value


def upper_prevision_sdp(a: QuantumAssessmentSet, f) -> float:
    F = _as_gamble(f, a.dims)
    return -lower_prevision_sdp(a, -F)


def hermitian_basis(n: int) -> list:
    """Orthonormal basis of the ``n x n`` Hermitian matrices (trace inner product)."""
    out = []
    for j in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[j, j] = 1.0
        out.append(E)
    r = 1.0 / np.sqrt(2.0)
    for j in range(n):
        for k in range(j + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[j, k] = E[k, j] = r
            out.append(E)
            E = np.zeros((n, n), dtype=complex)
            E[j, k] = -1j * r
            E[k, j] = 1j * r
            out.append(E)
    return out


def pin_state_assessments(rho, dims=None) -> QuantumAssessmentSet:
    """Assessments whose only dual state is ``rho``: each ``±(E_k - Tr(E_k rho) I)``."""
    rho = density_matrix(rho)
    n = rho.shape[0]
    gs = []
    for E in hermitian_basis(n):
        G = E - np.trace(E @ rho).real * np.eye(n)
        gs.extend([G, -G])
    return QuantumAssessmentSet(gs, n if dims is None else dims)


def born_probabilities(rho, projectors) -> np.ndarray:
    rho = density_matrix(rho)
    ps = projective_measurement(projectors)
    if ps[0].shape != rho.shape:
        raise ValueError("measurement and state dimensions differ")
    p = np.array([float(np.trace(P @ rho).real) for P in ps])
    assert abs(p.sum() - 1.0) <= 1e-9
    return p


def luder_condition(rho, pi) -> np.ndarray:
    """State after observing the projector ``pi``: ``pi rho pi / Tr(pi rho pi)``."""
    rho = density_matrix(rho)
    P = linalg.hermitian(pi)
    if P.shape != rho.shape:
        raise ValueError("projector and state dimensions differ")
    if np.abs(P @ P - P).max() > 1e-9:
        raise ValueError("conditioning event is not a projector")
    post = P @ rho @ P
    pr = float(np.trace(post).real)
    if pr <= PROB_TOL:
        raise UndefinedConditional(f"undefined conditional: event has probability {pr:.3e}")
    return density_matrix(post / pr)


def unitary_evolve(rho, u) -> np.ndarray:
    """``U rho U^H`` for a unitary ``U``."""
    rho = density_matrix(rho)
    U = np.asarray(u, dtype=complex)
    if U.shape != rho.shape:
        raise ValueError("unitary and state dimensions differ")
    if not np.all(np.isfinite(U)) or np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() > 1e-9:
        raise ValueError("matrix is not unitary")
    return density_matrix(U @ rho @ U.conj().T)
