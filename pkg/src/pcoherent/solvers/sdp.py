"""Small dense semidefinite programs by primal-dual path following.

Standard form, with blocks ``b`` that are either PSD matrices or
nonnegative vectors ("nonneg" blocks, i.e. diagonal PSD blocks)::

    (P)  min  sum_b <C_b, X_b>   s.t.  sum_b <A_ib, X_b> = b_i,  X_b >= 0
    (D)  max  b @ y              s.t.  S_b = C_b - sum_i y_i A_ib >= 0

Complex Hermitian PSD blocks are embedded as real symmetric blocks of twice
the size, ``M -> [[Re M, -Im M], [Im M, Re M]] / 2``; the factor one half keeps
inner products unchanged. Search directions are HKM (the symmetrized
``X dS S^-1`` direction) with a Mehrotra predictor-corrector.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .report import SolveReport

log = logging.getLogger(__name__)

STEP_FRACTION = 0.98
MAX_ITER = 200


@dataclass
class SemidefiniteProgram:
    """Block SDP data.

    ``blocks`` lists ``(dim, kind)`` with ``kind`` in ``{"psd", "nonneg"}``.
    ``C`` holds one entry per block (matrix for psd, vector for nonneg; ``None``
    means zero). ``A`` is a list over constraints of per-block entries in the
    same layout, and ``b`` the right-hand sides.
    """

    blocks: Sequence[tuple]
    C: Sequence
    A: Sequence[Sequence]
    b: Sequence[float]

    def __post_init__(self):
        self.blocks = [(int(d), str(k)) for d, k in self.blocks]
        for d, k in self.blocks:
            if d < 1 or k not in ("psd", "nonneg"):
                raise ValueError(f"bad block ({d}, {k})")
        self.b = np.asarray(self.b, dtype=float).ravel()
        if len(self.A) != self.b.size:
            raise ValueError("number of constraint matrices and rhs entries differ")
        if len(self.C) != len(self.blocks):
            raise ValueError("C must have one entry per block")
        self.C = [self._entry(c, j) for j, c in enumerate(self.C)]
        self.A = [[self._entry(a, j) for j, a in enumerate(row)] for row in self.A]
        for row in self.A:
            if len(row) != len(self.blocks):
                raise ValueError("each constraint needs one entry per block")
        if not np.all(np.isfinite(self.b)):
            raise ValueError("rhs must be finite")

    def _entry(self, a, j):
        d, kind = self.blocks[j]
        if kind == "nonneg":
            v = np.zeros(d) if a is None else np.asarray(a, dtype=float).ravel()
            if v.shape != (d,) or not np.all(np.isfinite(v)):
                raise ValueError(f"block {j}: expected a finite vector of length {d}")
            return v
        M = np.zeros((d, d)) if a is None else np.asarray(a)
        if M.shape != (d, d) or not np.all(np.isfinite(M)):
            raise ValueError(f"block {j}: expected a finite {d}x{d} matrix")
        if np.abs(M - M.conj().T).max() > 1e-12 * max(1.0, float(np.abs(M).max())):
            raise ValueError(f"block {j}: matrix is not Hermitian")
        return 0.5 * (M + M.conj().T)

    @property
    def m(self) -> int:
        return self.b.size


@dataclass
class _Block:
    kind: str
    dim: int  # user dimension
    cplx: bool
    C: np.ndarray
    A: np.ndarray  # (m, k, k) or (m, k)

    @property
    def size(self) -> int:
        return 2 * self.dim if self.cplx else self.dim


def _embed(M: np.ndarray) -> np.ndarray:
    re, im = M.real, M.imag
    return 0.5 * np.block([[re, -im], [im, re]])


def _unembed(X: np.ndarray, n: int, scale: float = 1.0) -> np.ndarray:
    re = 0.5 * (X[:n, :n] + X[n:, n:])
    im = 0.5 * (X[n:, :n] - X[:n, n:])
    return scale * (re + 1j * im)


def _real_blocks(p: SemidefiniteProgram) -> list:
    out = []
    for j, (d, kind) in enumerate(p.blocks):
        data = [p.C[j]] + [row[j] for row in p.A]
        if kind == "nonneg":
            A = np.array([row[j] for row in p.A]).reshape(p.m, d)
            out.append(_Block(kind, d, False, p.C[j].copy(), A))
            continue
        cplx = any(np.iscomplexobj(a) and np.abs(a.imag).max() > 0 for a in data)
        if cplx:
            C = _embed(p.C[j])
            A = np.array([_embed(row[j]) for row in p.A]).reshape(p.m, 2 * d, 2 * d)
        else:
            C = p.C[j].real.copy()
            A = np.array([row[j].real for row in p.A]).reshape(p.m, d, d)
        out.append(_Block(kind, d, cplx, C, A))
    return out


def _inner(blk, U, V):
    return float(np.dot(U, V)) if blk.kind == "nonneg" else float(np.sum(U * V))


def _op_A(blocks, X):
    return sum((blk.A @ x if blk.kind == "nonneg" else np.einsum("ijk,jk->i", blk.A, x)) for blk, x in zip(blocks, X))


def _op_At(blocks, y):
    return [np.tensordot(y, blk.A, axes=1) for blk in blocks]


def _min_eig(blk, M):
    if blk.kind == "nonneg":
        return float(M.min()) if M.size else np.inf
    return float(np.linalg.eigvalsh(M)[0])


def _max_step(blk, X, dX):
    if blk.kind == "nonneg":
        neg = dX < 0
        return float(np.min(-X[neg] / dX[neg])) if np.any(neg) else np.inf
    L = np.linalg.cholesky(X)
    Li = np.linalg.inv(L)
    lam = np.linalg.eigvalsh(Li @ dX @ Li.T)[0]
    return -1.0 / lam if lam < 0 else np.inf


def _sym(M):
    return 0.5 * (M + M.T)


def _nrm(blocks, R):
    return float(np.sqrt(sum(_inner(b, r, r) for b, r in zip(blocks, R))))


def solve_sdp(
    p: SemidefiniteProgram,
    gap_tol: float = 1e-9,
    feas_tol: float = 1e-9,
    max_iter: int = MAX_ITER,
    start=None,
) -> SolveReport:
    """Primal-dual interior point solve of ``p``.

    ``start`` may supply a ``(X, y, S)`` triple in user block layout; by
    default the iteration starts from scaled identity blocks. On success
    ``primal`` is the list of ``X_b`` blocks (complex blocks are returned in
    their Hermitian form), ``dual`` is ``y`` and ``extra['S']`` the dual slack.
    ``extra['history']`` records ``(primal_obj, dual_obj, primal_res, dual_res)``
    per iterate.
    """
    blocks = _real_blocks(p)
    b = p.b
    m = p.m
    nu = sum(blk.size for blk in blocks)
    normb = 1.0 + float(np.linalg.norm(b))
    normC = 1.0 + _nrm(blocks, [blk.C for blk in blocks])

    if start is None:
        X, S = [], []
        for blk in blocks:
            k = blk.size
            normA = np.sqrt((blk.A.reshape(m, -1) ** 2).sum(axis=1)) if m else np.zeros(0)
            normCb = float(np.linalg.norm(blk.C))
            xi = max(10.0, np.sqrt(k), k * float(np.max((1 + np.abs(b)) / (1 + normA))) if m else 0.0)
            eta = max(10.0, np.sqrt(k), float(normA.max()) if m else 0.0, normCb)
            X.append(xi * (np.ones(k) if blk.kind == "nonneg" else np.eye(k)))
            S.append(eta * (np.ones(k) if blk.kind == "nonneg" else np.eye(k)))
        y = np.zeros(m)
    else:
        X0, y0, S0 = start
        X, S = [], []
        for blk, x, s in zip(blocks, X0, S0):
            if blk.kind == "psd" and blk.cplx:
                # X is embedded at full scale and S at half scale
                x = 2.0 * _embed(np.asarray(x, dtype=complex))
                s = _embed(np.asarray(s, dtype=complex))
            X.append(np.array(np.real(x), dtype=float))
            S.append(np.array(np.real(s), dtype=float))
        y = np.asarray(y0, dtype=float).copy()

    history = []
    status = "numerical-failure"
    certificate = None
    it = 0
    small_steps = 0

    def objectives():
        return sum(_inner(blk, blk.C, x) for blk, x in zip(blocks, X)), float(b @ y)

    for it in range(max_iter + 1):
        rp = b - _op_A(blocks, X)
        At_y = _op_At(blocks, y)
        Rd = [blk.C - a - s for blk, a, s in zip(blocks, At_y, S)]
        pobj, dobj = objectives()
        pres = float(np.linalg.norm(rp)) / normb
        dres = _nrm(blocks, Rd) / normC
        gap = abs(pobj - dobj)
        history.append((pobj, dobj, pres, dres))
        log.debug("sdp it %3d  pobj % .10e  dobj % .10e  pres %.2e  dres %.2e", it, pobj, dobj, pres, dres)

        if pres <= feas_tol and dres <= feas_tol and gap <= gap_tol * max(1.0, abs(pobj)):
            status = "optimal"
            break

        # improving dual ray => primal infeasible
        if dobj > 0:
            yhat = y / dobj
            Aty = _op_At(blocks, yhat)
            neg = max(max(0.0, -_min_eig(blk, -a)) for blk, a in zip(blocks, Aty)) if blocks else 0.0
            scale = max(1.0, max(float(np.abs(a).max()) for a in Aty) if blocks else 1.0)
            if neg <= feas_tol * scale:
                status = "infeasible"
                certificate = yhat
                break
        # improving primal ray => dual infeasible
        if pobj < 0:
            Xhat = [x / -pobj for x in X]
            ax = np.linalg.norm(_op_A(blocks, Xhat))
            if ax <= feas_tol * max(1.0, _nrm(blocks, Xhat)):
                status = "unbounded"
                certificate = Xhat
                break
        if it == max_iter:
            break

        try:
            step = _newton(blocks, X, S, y, rp, Rd, nu)
        except np.linalg.LinAlgError:
            log.debug("sdp: factorization failed at iteration %d", it)
            break
        dX, dy, dS, ap, ad = step
        X = [x + ap * dx for x, dx in zip(X, dX)]
        S = [s + ad * ds for s, ds in zip(S, dS)]
        y = y + ad * dy
        X = [_sym(x) if blk.kind == "psd" else x for blk, x in zip(blocks, X)]
        S = [_sym(s) if blk.kind == "psd" else s for blk, s in zip(blocks, S)]
        if max(ap, ad) < 1e-8:
            small_steps += 1
            if small_steps >= 5:
                log.debug("sdp: stalled at iteration %d", it)
                break
        else:
            small_steps = 0

    pobj, dobj = objectives()
    Xu = [_unembed(x, blk.dim) if blk.cplx else x.copy() for blk, x in zip(blocks, X)]
    Su = [_unembed(s, blk.dim, 2.0) if blk.cplx else s.copy() for blk, s in zip(blocks, S)]
    if status == "unbounded":
        certificate = [_unembed(x, blk.dim) if blk.cplx else x for blk, x in zip(blocks, certificate)]
    obj = pobj
    if status == "infeasible":
        obj = np.inf
    elif status == "unbounded":
        obj = -np.inf
    return SolveReport(
        status,
        Xu,
        y,
        obj,
        abs(pobj - dobj),
        it,
        dual_objective=dobj,
        certificate=certificate,
        primal_residual=history[-1][2],
        dual_residual=history[-1][3],
        extra={"S": Su, "history": history},
    )


def _newton(blocks, X, S, y, rp, Rd, nu):
    m = y.size
    mu = sum(_inner(blk, x, s) for blk, x, s in zip(blocks, X, S)) / nu
    Sinv = []
    M = np.zeros((m, m))
    for blk, x, s in zip(blocks, X, S):
        if blk.kind == "nonneg":
            si = 1.0 / s
            Sinv.append(si)
            M += (blk.A * (x * si)) @ blk.A.T
        else:
            si = np.linalg.inv(np.linalg.cholesky(s))
            si = si.T @ si
            Sinv.append(_sym(si))
            W = x @ blk.A @ si  # X A_i S^-1, batched
            M += np.einsum("jpq,iqp->ij", blk.A, W)
    M = _sym(M)
    try:
        cho = np.linalg.cholesky(M)
        solve = lambda r: np.linalg.solve(cho.T, np.linalg.solve(cho, r))
    except np.linalg.LinAlgError:
        Mp = np.linalg.pinv(M, rcond=1e-14)
        solve = lambda r: Mp @ r

    def direction(sigma, Q):
        rhs = rp.copy()
        parts = []
        for blk, x, s, si, rd, q in zip(blocks, X, S, Sinv, Rd, Q):
            if blk.kind == "nonneg":
                T = (sigma * mu - q) * si - x - x * rd * si
            else:
                T = (sigma * mu * np.eye(blk.size) - q) @ si - x - x @ rd @ si
            parts.append(T)
        # A(dX) = rp with dX = T + X A*(dy) S^-1
        rhs = rp - sum(
            (blk.A @ T if blk.kind == "nonneg" else np.einsum("ijk,jk->i", blk.A, T)) for blk, T in zip(blocks, parts)
        )
        dy = solve(rhs)
        for _ in range(2):  # iterative refinement
            dy = dy + solve(rhs - M @ dy)
        Atdy = _op_At(blocks, dy)
        dX, dS = [], []
        for blk, x, si, rd, T, a in zip(blocks, X, Sinv, Rd, parts, Atdy):
            ds = rd - a
            if blk.kind == "nonneg":
                dx = T + x * a * si
            else:
                dx = _sym(T + x @ a @ si)
                ds = _sym(ds)
            dX.append(dx)
            dS.append(ds)
        return dX, dy, dS

    def steps(dX, dS, frac):
        ap = min([1.0] + [frac * _max_step(blk, x, d) for blk, x, d in zip(blocks, X, dX)])
        ad = min([1.0] + [frac * _max_step(blk, s, d) for blk, s, d in zip(blocks, S, dS)])
        return ap, ad

    zeros = [np.zeros_like(x) for x in X]
    dXa, dya, dSa = direction(0.0, zeros)
    ap, ad = steps(dXa, dSa, 1.0)
    mu_aff = sum(_inner(blk, x + ap * dx, s + ad * ds) for blk, x, dx, s, ds in zip(blocks, X, dXa, S, dSa)) / nu
    sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0
    Q = [dx * ds if blk.kind == "nonneg" else dx @ ds for blk, dx, ds in zip(blocks, dXa, dSa)]
    dX, dy, dS = direction(sigma, Q)
    ap, ad = steps(dX, dS, STEP_FRACTION)
    return dX, dy, dS, ap, ad


def verify_infeasibility(p: SemidefiniteProgram, y, tol: float = 1e-9) -> bool:
    """Check a Farkas ray for (P): ``b @ y > 0`` and ``-sum(y_i A_i)`` PSD on every block.

    The ray is rescaled to ``b @ y = 1`` first; PSD is tested to ``tol`` times
    the largest entry of ``sum(y_i A_i)``.
    """
    y = np.asarray(y, dtype=float)
    by = float(p.b @ y)
    if not by > 0:
        return False
    y = y / by
    worst, scale = 0.0, 1.0
    for j, (d, kind) in enumerate(p.blocks):
        M = sum((yi * row[j] for yi, row in zip(y, p.A)), np.zeros_like(p.A[0][j]) if p.A else 0)
        scale = max(scale, float(np.abs(M).max()))
        lam = float(np.min(-M)) if kind == "nonneg" else float(np.linalg.eigvalsh(-M)[0])
        worst = min(worst, lam)
    return worst >= -tol * scale
