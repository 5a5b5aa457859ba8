"""Entanglement witnesses read as Dutch books, and the CHSH gap.

Maximizing a Hermitian gamble over product states is NP-hard in general, so
:func:`product_state_max` runs a see-saw ascent from many seeded starts. The
value it returns is attained, hence a sound lower bound on the supremum, and
``lambda_max(G)`` is reported alongside as the trivial upper bound.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import linalg
from .errors import NumericalFailure
from .quantum import HermitianGamble, _as_gamble, density_matrix

log = logging.getLogger(__name__)

DEFAULT_RESTARTS = 256
SEE_SAW_TOL = 1e-10
SEE_SAW_MAX_ITER = 1000
PPT_EXACT_DIMS = 6  # 2x2 and 2x3


def _effective(G: np.ndarray, factors, j: int) -> np.ndarray:
    """``B^H G B`` with ``B = x_1 ⊗ .. ⊗ I ⊗ .. ⊗ x_m`` (identity in slot ``j``)."""
    parts = [np.eye(x.size) if k == j else x[:, None] for k, x in enumerate(factors)]
    B = reduce(np.kron, parts)
    return B.conj().T @ G @ B


def see_saw(g, factors, tol: float = SEE_SAW_TOL, max_iter: int = SEE_SAW_MAX_ITER):
    """Alternating top-eigenvector ascent from the given starting factors.

    Returns ``(value, factors, history)`` where ``history`` lists the objective
    after every single-factor update (non-decreasing up to rounding).
    """
    g = _as_gamble(g)
    dims = list(g.dims)
    xs = [linalg.unit_vector(f, normalize=True).copy() for f in factors]
    if [x.size for x in xs] != dims:
        raise ValueError("starting factors do not match the gamble's dims")
    value = linalg.qform(g.G, linalg.ProductState(xs))
    history = [value]
    for _ in range(max_iter):
        before = value
        for j in range(len(dims)):
            w, V = linalg.eigh(linalg.hermitian(_effective(g.G, xs, j), tol=1e-9))
            xs[j] = V[:, -1]
            value = float(w[-1])
            history.append(value)
        if value - before < tol:
            break
    return value, linalg.ProductState(xs, normalize=True), history


@dataclass(frozen=True)
class ProductMax:
    """Best product-state value found, with the attaining state.

    ``value`` is attained (a lower bound on the supremum); ``upper_bound`` is
    ``lambda_max(G)``. ``restarts`` starts were tried.
    """

    value: float
    state: linalg.ProductState
    upper_bound: float
    restarts: int
    best_restart: int


def product_state_max(g, restarts: int = DEFAULT_RESTARTS, rng_seed=0, threads: int = 1) -> ProductMax:
    """Best value of ``(⊗x)^H G (⊗x)`` over seeded see-saw restarts."""
    g = _as_gamble(g)
    ev = linalg.eigh(g.G)
    lam_max = float(ev.eigenvalues[-1])
    if len(g.dims) == 1:
        return ProductMax(lam_max, linalg.ProductState([ev.eigenvectors[:, -1]], normalize=True), lam_max, 0, 0)
    if restarts < 1:
        raise ValueError("restarts must be positive")
    seeds = np.random.SeedSequence(rng_seed).spawn(restarts)

    def one(seed):
        rng = np.random.default_rng(seed)
        start = [linalg.random_unit(d, rng) for d in g.dims]
        value, state, _ = see_saw(g, start)
        return value, state

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    best = 0
    for i, (v, _) in enumerate(results):
        if v > results[best][0]:
            best = i
    value, state = results[best]
    log.debug("product max %.12g from restart %d of %d", value, best, restarts)
    return ProductMax(value, state, lam_max, restarts, best)


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of testing ``H - eps I`` as a gamble desirable under ``rho`` yet
    negative on every product state.

    ``epsilon_band`` is ``(lo, hi)``: the strict condition holds for
    ``lo < eps <= hi``, empty when ``lo >= hi``.
    """

    epsilon: float
    trace_value: float
    product_max: float
    product_max_state: linalg.ProductState
    upper_bound: float
    condition_holds: bool
    epsilon_band: tuple
    restarts: int

    @property
    def band_nonempty(self) -> bool:
        return self.epsilon_band[0] < self.epsilon_band[1]


def witness_check(
    h,
    rho,
    epsilon: float = 0.0,
    dims=None,
    tol: float = 1e-9,
    restarts: int = DEFAULT_RESTARTS,
    rng_seed=0,
    threads: int = 1,
) -> WitnessReport:
    """Check ``Tr((H - eps I) rho) >= 0`` and ``(⊗x)^H (H - eps I)(⊗x) < 0`` on product states.

    ``dims`` gives the subsystem shape when ``h`` is a plain matrix.
    """
    if not epsilon >= 0:
        raise ValueError("epsilon must be nonnegative")
    h = _as_gamble(h, dims)
    if len(h.dims) < 2:
        raise ValueError("a witness check needs a composite shape; pass dims")
    rho = density_matrix(rho)
    if rho.shape != h.G.shape:
        raise ValueError("state and gamble dimensions differ")
    shifted = h.shift(epsilon)
    tr = float(np.trace(shifted.G @ rho).real)
    pm = product_state_max(shifted, restarts, rng_seed, threads)
    holds = tr >= -tol and pm.value < -tol
    band = (max(0.0, pm.value + epsilon), tr + epsilon)
    return WitnessReport(epsilon, tr, pm.value, pm.state, pm.upper_bound, bool(holds), band, pm.restarts)


@dataclass(frozen=True)
class PPTResult:
    """``entangled`` is ``True``/``False``, or ``None`` when PPT is not decisive for the shape."""

    entangled: bool | None
    min_eigenvalue: float
    exact: bool


def _bipartite(dims, n):
    dims = tuple(int(d) for d in dims)
    if len(dims) != 2 or dims[0] * dims[1] != n:
        raise ValueError(f"expected a bipartite shape matching dimension {n}, got {dims}")
    return dims


def ppt_check(rho, dims, tol: float = 1e-9) -> PPTResult:
    """Partial-transpose test on the second factor."""
    rho = density_matrix(rho)
    dims = _bipartite(dims, rho.shape[0])
    w = linalg.eigvalsh(linalg.partial_transpose(rho, dims, 1))
    lam = float(w[0])
    exact = dims[0] * dims[1] <= PPT_EXACT_DIMS
    if lam < -tol:
        return PPTResult(True, lam, exact)
    return PPTResult(False if exact else None, lam, exact)


def witness_from_ppt(rho, dims, tol: float = 1e-6, restarts: int = DEFAULT_RESTARTS, rng_seed=0) -> HermitianGamble:
    """``W = (eta eta^H)^T2`` from the negative eigenvector ``eta`` of ``rho^T2``.

    ``Tr(rho W)`` equals the negative eigenvalue, while ``W`` is nonnegative on
    product states; both facts are re-checked before returning.
    """
    rho = density_matrix(rho)
    dims = _bipartite(dims, rho.shape[0])
    ev = linalg.eigh(linalg.partial_transpose(rho, dims, 1))
    if ev.eigenvalues[0] >= -1e-9:
        raise ValueError("state has a positive partial transpose; no witness of this kind exists")
    eta = ev.eigenvectors[:, 0]
    W = HermitianGamble(linalg.partial_transpose(np.outer(eta, eta.conj()), dims, 1), dims)
    tr = float(np.trace(rho @ W.G).real)
    if not tr < 0:
        raise NumericalFailure("witness does not detect the state")
    neg = product_state_max(-W, restarts, rng_seed)
    if neg.value > tol:
        raise NumericalFailure(f"witness is negative on a product state ({-neg.value:.3e})")
    return W


@dataclass(frozen=True)
class ChshConfig:
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        if not all(np.isfinite([self.alpha1, self.alpha2, self.beta1, self.beta2])):
            raise ValueError("angles must be finite")


BOX2_ANGLES = ChshConfig(np.pi / 2, 0.0, np.pi / 4, -np.pi / 4)
CLASSICAL_BOUND = 2.0


def spin_observable(theta: float) -> np.ndarray:
    """``sin(theta) sigma_x + cos(theta) sigma_z``."""
    return np.sin(theta) * linalg.PAULI_X + np.cos(theta) * linalg.PAULI_Z


def chsh_operator(c: ChshConfig = BOX2_ANGLES) -> HermitianGamble:
    """``A1 ⊗ (B1 - B2) + A2 ⊗ (B1 + B2)`` on two qubits."""
    A1, A2 = spin_observable(c.alpha1), spin_observable(c.alpha2)
    B1, B2 = spin_observable(c.beta1), spin_observable(c.beta2)
    return HermitianGamble(np.kron(A1, B1 - B2) + np.kron(A2, B1 + B2), (2, 2))


@dataclass(frozen=True)
class BellGapReport:
    """Quantum value against the product-state and algebraic bounds.

    ``product_max`` is the product-state supremum (the classical upper
    prevision over product states), ``lambda_max`` the vacuous P-coherent upper
    prevision. ``chain_holds`` asserts ``product_max <= 2 < lambda_max``
    with ``quantum_value <= lambda_max``.
    """

    quantum_value: float
    product_max: float
    classical_bound: float
    lambda_max: float
    chain_holds: bool
    product_max_state: linalg.ProductState


def bell_gap_report(
    c: ChshConfig, rho, tol: float = 1e-9, restarts: int = DEFAULT_RESTARTS, rng_seed=0, threads: int = 1
) -> BellGapReport:
    rho = density_matrix(rho)
    S = chsh_operator(c)
    if rho.shape != (4, 4):
        raise ValueError("CHSH needs a two-qubit state")
    q = float(np.trace(S.G @ rho).real)
    pm = product_state_max(S, restarts, rng_seed, threads)
    lam = pm.upper_bound
    assert pm.value <= CLASSICAL_BOUND + 1e-9
    assert q <= lam + 1e-9
    chain = pm.value <= CLASSICAL_BOUND + tol and CLASSICAL_BOUND < lam and q <= lam + tol
    return BellGapReport(q, pm.value, CLASSICAL_BOUND, lam, bool(chain), pm.state)
