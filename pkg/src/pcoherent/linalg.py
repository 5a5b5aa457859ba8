"""Dense complex linear algebra for Hermitian gambles and states.

Matrices are plain :class:`numpy.ndarray` objects. Constructors such as
:func:`hermitian` validate and symmetrize their input and return read-only
copies, so values can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NoConvergence

HERMITIAN_TOL = 1e-12
UNIT_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate ``a`` as a Hermitian matrix and return its exact symmetrization.

    The check is relative: ``|a - a^H|_max <= tol * max(1, |a|_max)``. The
    diagonal of the result has zero imaginary part.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - a.conj().T).max() > tol * scale:
        raise ValueError("matrix is not Hermitian")
    h = 0.5 * (a + a.conj().T)
    h[np.diag_indices_from(h)] = h.diagonal().real
    return _frozen(h)


def unit_vector(x, tol: float = UNIT_TOL, normalize: bool = False) -> np.ndarray:
    """Validate ``x`` as a complex unit vector (or normalize it when asked)."""
    x = np.asarray(x, dtype=complex).ravel()
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise ValueError("unit vector must be non-empty and finite")
    norm = np.linalg.norm(x)
    if normalize:
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        x = x / norm
    elif abs(norm - 1.0) > tol:
        raise ValueError(f"vector norm {norm!r} differs from 1")
    return _frozen(x)


@dataclass(frozen=True, eq=False)
class ProductState:
    """A tensor product of unit vectors, one per subsystem."""

    factors: tuple

    def __init__(self, factors: Sequence, normalize: bool = False):
        object.__setattr__(
            self, "factors", tuple(unit_vector(f, normalize=normalize) for f in factors)
        )
        if not self.factors:
            raise ValueError("a product state needs at least one factor")

    @property
    def dims(self) -> tuple:
        return tuple(f.size for f in self.factors)

    def __eq__(self, other):
        if not isinstance(other, ProductState) or self.dims != other.dims:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.factors, other.factors))

    __hash__ = None

    @property
    def vector(self) -> np.ndarray:
        return reduce(np.kron, self.factors)

    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns


def _jacobi_angle(a: float, d: float, beta: float):
    # rotation zeroing the off-diagonal of [[a, beta], [beta, d]], beta > 0
    tau = (d - a) / (2.0 * beta)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
    c = 1.0 / np.hypot(1.0, t)
    return c, t * c


def eigh(a) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Eigenvalues are returned in ascending order together with an orthonormal
    set of eigenvectors (as columns). Raises :class:`NoConvergence` if the
    off-diagonal mass does not vanish within ``100 n^2`` rotations.
    """
    A = np.array(hermitian(a), dtype=complex)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    total = np.linalg.norm(A)
    if n == 1 or total == 0.0:
        return EigenDecomposition(_frozen(A.diagonal().real), _frozen(V))

    cap = 100 * n * n
    rotations = 0
    iu = np.triu_indices(n, 1)
    while True:
        off = np.linalg.norm(A[iu])
        if off <= 1e-15 * total:
            break
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                beta = abs(b)
                if beta <= 1e-300 or beta <= 1e-18 * total:
                    continue
                c, s = _jacobi_angle(A[p, p].real, A[q, q].real, beta)
                phase = b / beta
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                J = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ J
                A[idx, :] = J.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, idx] = V[:, idx] @ J
                rotations += 1
                rotated = True
                if rotations > cap:
                    raise NoConvergence(f"Jacobi eigensolver: no convergence after {cap} rotations")
        if not rotated:
            break

    w = A.diagonal().real
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(_frozen(w[order]), _frozen(V[:, order]))


def eigvalsh(a) -> np.ndarray:
    return eigh(a).eigenvalues


def spectral_norm(a) -> float:
    w = eigvalsh(a)
    return float(max(abs(w[0]), abs(w[-1])))


def _default_tol(w: np.ndarray) -> float:
    return 1e-8 * max(1.0, float(max(abs(w[0]), abs(w[-1]))))


def is_psd(a, tol: float | None = None) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol``.

    The default tolerance is ``1e-8 * max(1, |a|_2)``.
    """
    w = eigvalsh(a)
    if tol is None:
        tol = _default_tol(w)
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return bool(w[0] >= -tol)


def is_nd(a, tol: float | None = None) -> bool:
    """True iff the largest eigenvalue is strictly below ``-tol`` (an open cone)."""
    w = eigvalsh(a)
    if tol is None:
        tol = _default_tol(w)
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return bool(w[-1] < -tol)


def kron(*mats) -> np.ndarray:
    """Kronecker product of Hermitian matrices."""
    if not mats:
        raise ValueError("kron needs at least one matrix")
    return hermitian(reduce(np.kron, [np.asarray(m, dtype=complex) for m in mats]))


def _check_dims(n: int, dims: Sequence[int]) -> list:
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims) or int(np.prod(dims)) != n:
        raise ValueError(f"subsystem dims {dims} do not match matrix dimension {n}")
    return dims


def partial_trace(a, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced matrix over the factors listed in ``keep`` (0-based indices)."""
    a = hermitian(a)
    dims = _check_dims(a.shape[0], dims)
    keep = sorted({int(k) for k in np.atleast_1d(keep)})
    m = len(dims)
    if not keep or keep[0] < 0 or keep[-1] >= m:
        raise ValueError(f"keep must be a non-empty subset of factor indices 0..{m - 1}")
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * m > len(letters):
        raise ValueError("too many subsystems")
    rows = list(letters[:m])
    cols = list(letters[m : 2 * m])
    for j in range(m):
        if j not in keep:
            cols[j] = rows[j]
    out = "".join(rows[j] for j in keep) + "".join(cols[j] for j in keep)
    t = np.einsum("".join(rows) + "".join(cols) + "->" + out, a.reshape(dims + dims))
    k = int(np.prod([dims[j] for j in keep]))
    return hermitian(t.reshape(k, k))


def partial_transpose(a, dims: Sequence[int], sys: int = 1) -> np.ndarray:
    """Transpose the indices of factor ``sys`` (0-based)."""
    a = np.asarray(a, dtype=complex)
    dims = _check_dims(a.shape[0], dims)
    m = len(dims)
    t = a.reshape(dims + dims)
    axes = list(range(2 * m))
    axes[sys], axes[m + sys] = axes[m + sys], axes[sys]
    return hermitian(t.transpose(axes).reshape(a.shape))


def qform(g, s: ProductState) -> float:
    """Evaluate the gamble ``(x_1 ⊗ ... ⊗ x_m)^H G (x_1 ⊗ ... ⊗ x_m)``."""
    g = np.asarray(g, dtype=complex)
    v = s.vector
    if g.shape != (v.size, v.size):
        raise ValueError(f"gamble of shape {g.shape} does not match product state of dim {v.size}")
    val = v.conj() @ g @ v
    assert abs(val.imag) <= 1e-12 * max(1.0, float(np.abs(g).max())) * v.size
    return float(val.real)


def random_unit(dim: int, rng_seed=None) -> np.ndarray:
    """Normalized standard complex Gaussian vector; deterministic per seed.

    ``rng_seed`` is anything :func:`numpy.random.default_rng` accepts,
    including an existing generator (which is then advanced).
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = np.random.default_rng(rng_seed)
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return _frozen(x / np.linalg.norm(x))


def random_hermitian(dim: int, rng_seed=None) -> np.ndarray:
    rng = np.random.default_rng(rng_seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return hermitian(0.5 * (a + a.conj().T))


def random_density(dim: int, rng_seed=None, rank: int | None = None) -> np.ndarray:
    rng = np.random.default_rng(rng_seed)
    k = dim if rank is None else rank
    a = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    rho = a @ a.conj().T
    return hermitian(rho / np.trace(rho).real)


def random_unitary(dim: int, rng_seed=None) -> np.ndarray:
    rng = np.random.default_rng(rng_seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


PAULI_X = hermitian([[0, 1], [1, 0]])
PAULI_Y = hermitian([[0, -1j], [1j, 0]])
PAULI_Z = hermitian([[1, 0], [0, -1]])
