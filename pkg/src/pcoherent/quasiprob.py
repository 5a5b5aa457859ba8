"""Signed charges: finite point masses on product states with real weights.

A charge ``sum_i w_i delta(x^(i))`` reproduces a density matrix when its
moment matrix ``sum_i w_i P_i`` (``P_i`` the product projectors) equals it.
Separable states admit nonnegative weights; entangled ones only signed ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

import numpy as np

from . import linalg
from .quantum import density_matrix
from .solvers import LinearProgram, solve_lp

FIT_TOL = 1e-8
FITTED_SUM_TOL = 1e-9
TRANSCRIBED_SUM_TOL = 1e-3


class IllConditionedAtoms(ValueError):
    """The sampled atoms cannot reproduce the target to the required accuracy."""


@dataclass(frozen=True)
class SignedCharge:
    atoms: tuple  # of (ProductState, weight)

    def __init__(self, atoms: Sequence, sum_tol: float = FITTED_SUM_TOL):
        out = []
        for state, w in atoms:
            if not isinstance(state, linalg.ProductState):
                state = linalg.ProductState(state)
            w = float(w)
            if not np.isfinite(w):
                raise ValueError("weights must be finite")
            out.append((state, w))
        if not out:
            raise ValueError("a charge needs at least one atom")
        dims = out[0][0].dims
        if any(s.dims != dims for s, _ in out):
            raise ValueError("all atoms must share one shape")
        total = sum(w for _, w in out)
        if abs(total - 1.0) > sum_tol:
            raise ValueError(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", tuple(out))

    @property
    def dims(self) -> tuple:
        return self.atoms[0][0].dims

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    @property
    def min_weight(self) -> float:
        return float(self.weights.min())


def charge_moment_matrix(c: SignedCharge) -> np.ndarray:
    """``sum_i w_i (⊗x^(i))(⊗x^(i))^H``."""
    return linalg.hermitian(sum(w * s.projector() for s, w in c.atoms))


def marginal_moments(c: SignedCharge, factor: int) -> np.ndarray:
    """``sum_i w_i x^(i)_f x^(i)_f^H`` for factor ``f`` (0-based)."""
    if not 0 <= factor < len(c.dims):
        raise ValueError(f"factor index {factor} out of range for dims {c.dims}")
    return linalg.hermitian(sum(w * np.outer(s.factors[factor], s.factors[factor].conj()) for s, w in c.atoms))


def _real_moments(P: np.ndarray) -> np.ndarray:
    return np.concatenate([P.real.ravel(), P.imag.ravel()])


def random_atoms(dims, k: int, rng_seed=None) -> list:
    """``k`` seeded random product states of the given shape."""
    rng = np.random.default_rng(rng_seed)
    return [linalg.ProductState([linalg.random_unit(d, rng) for d in dims]) for _ in range(k)]


def _design(atoms) -> np.ndarray:
    return np.column_stack([_real_moments(s.projector()) for s in atoms])


def fit_signed_charge(target, dims, k_atoms: int, rng_seed=None, atoms=None) -> SignedCharge:
    """Least-squares weights on ``k_atoms`` random product states matching ``target``.

    ``atoms`` may supply the product states instead of sampling them. Raises
    :class:`IllConditionedAtoms` if the residual exceeds ``1e-8`` in Frobenius norm.
    """
    rho = density_matrix(target)
    dims = tuple(int(d) for d in dims)
    n = rho.shape[0]
    if int(np.prod(dims)) != n:
        raise ValueError(f"dims {dims} do not match dimension {n}")
    if atoms is None:
        if k_atoms < n * n:
            raise ValueError(f"need at least {n * n} atoms for a {n}x{n} target")
        atoms = random_atoms(dims, k_atoms, rng_seed)
    A = _design(atoms)
    b = _real_moments(rho)
    w, *_ = np.linalg.lstsq(A, b, rcond=None)
    res = float(np.linalg.norm(A @ w - b))
    if res > FIT_TOL:
        raise IllConditionedAtoms(f"ill-conditioned atom set: residual {res:.3e}")
    assert abs(w.sum() - 1.0) <= FITTED_SUM_TOL
    return SignedCharge(list(zip(atoms, w)))


def nonnegative_charge(target, dims, k_atoms: int, rng_seed=None, atoms=None) -> SignedCharge | None:
    """Nonnegative weights on sampled product states matching ``target`` (an LP),
    or ``None`` when the sample admits none."""
    rho = density_matrix(target)
    dims = tuple(int(d) for d in dims)
    if atoms is None:
        atoms = random_atoms(dims, k_atoms, rng_seed)
    A = _design(atoms)
    b = _real_moments(rho)
    rep = solve_lp(LinearProgram(c=np.zeros(A.shape[1]), A_eq=A, b_eq=b))
    if rep.status != "optimal":
        return None
    w = np.maximum(rep.primal, 0.0)
    if np.linalg.norm(A @ w - b) > FIT_TOL:
        return None
    return SignedCharge(list(zip(atoms, w)))


def eigen_charge(rho, dims=None) -> SignedCharge:
    """Single-system charge on the eigenvectors of ``rho`` with the eigenvalues as weights."""
    if dims is not None and len(tuple(np.atleast_1d(dims))) != 1:
        raise ValueError("eigen charges are single-system; use fit_signed_charge for composite shapes")
    rho = density_matrix(rho)
    ev = linalg.eigh(rho)
    if ev.eigenvalues[0] < -1e-9:
        raise ValueError("state has a negative eigenvalue")
    n = rho.shape[0]
    atoms = [(linalg.ProductState([ev.eigenvectors[:, i]], normalize=True), ev.eigenvalues[i]) for i in range(n)]
    return SignedCharge(atoms, sum_tol=1e-10)


def charge_from_records(records, sum_tol: float = FITTED_SUM_TOL, normalize: bool = False) -> SignedCharge:
    """Build a charge from ``{weight, factors: [[[re, im], ...], ...]}`` records."""
    atoms = []
    for r in records:
        factors = [np.array([complex(re, im) for re, im in f]) for f in r["factors"]]
        atoms.append((linalg.ProductState(factors, normalize=normalize), r["weight"]))
    return SignedCharge(atoms, sum_tol=sum_tol)


def charge_to_records(c: SignedCharge) -> list:
    return [
        {"weight": w, "factors": [[[float(z.real), float(z.imag)] for z in f] for f in s.factors]}
        for s, w in c.atoms
    ]


def box1_charge() -> SignedCharge:
    """The shipped nine-atom charge for the Bell state, given to four decimals.

    Factors are renormalized (at four decimals they are unit only to about 1e-4)
    and the weight sum is checked to ``1e-3``.
    """
    data = json.loads(resources.files("pcoherent.data").joinpath("box1_charge.json").read_text())
    return charge_from_records(data["atoms"], sum_tol=TRANSCRIBED_SUM_TOL, normalize=True)
