"""Dense two-phase simplex with Bland's anti-cycling rule.

Problems are stated as::

    min/max  c @ x
    s.t.     A_eq @ x == b_eq
             A_ub @ x <= b_ub
             lb <= x <= ub      (lb may be -inf, ub may be +inf)

and internally rewritten into the standard form ``A z = b, z >= 0``. The
report carries that standard form so certificates can be re-verified.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .report import SolveReport

log = logging.getLogger(__name__)

MAX_PIVOTS = 10**6
PIVOT_TOL = 1e-11
RATIO_TOL = 1e-9  # smallest usable pivot, relative to the entering column
REDUNDANT_TOL = 1e-7


@dataclass(frozen=True)
class LinearProgram:
    c: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    lb: np.ndarray | None = None  # default 0
    ub: np.ndarray | None = None  # default +inf
    sense: str = "min"

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        n = c.size
        object.__setattr__(self, "c", c)

        def mat(A, b, name):
            if A is None:
                return np.zeros((0, n)), np.zeros(0)
            A = np.atleast_2d(np.asarray(A, dtype=float))
            b = np.asarray(b, dtype=float).ravel()
            if A.shape != (b.size, n):
                raise ValueError(f"{name}: shape {A.shape} inconsistent with {b.size} rows, {n} vars")
            return A, b

        A_eq, b_eq = mat(self.A_eq, self.b_eq, "A_eq")
        A_ub, b_ub = mat(self.A_ub, self.b_ub, "A_ub")
        lb = np.zeros(n) if self.lb is None else np.broadcast_to(np.asarray(self.lb, float), (n,)).copy()
        ub = np.full(n, np.inf) if self.ub is None else np.broadcast_to(np.asarray(self.ub, float), (n,)).copy()
        for arr in (c, A_eq, b_eq, A_ub, b_ub):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP data must be finite")
        if np.any(np.isnan(lb)) or np.any(np.isnan(ub)) or np.any(lb == np.inf) or np.any(ub == -np.inf):
            raise ValueError("invalid variable bounds")
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        for name, val in (("A_eq", A_eq), ("b_eq", b_eq), ("A_ub", A_ub), ("b_ub", b_ub), ("lb", lb), ("ub", ub)):
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return self.c.size


@dataclass
class StandardForm:
    """``min c @ z  s.t.  A z = b, z >= 0`` with ``x = T z + x0``."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    T: np.ndarray
    x0: np.ndarray
    offset: float = 0.0  # objective constant (in the min-form)
    sign: float = 1.0  # -1 when the user problem is a max
    row_kind: list = field(default_factory=list)


def to_standard_form(p: LinearProgram) -> StandardForm:
    n = p.n
    cols = []  # (T column, cost)
    x0 = np.zeros(n)
    bound_rows = []  # (standard column index, rhs)
    for j in range(n):
        lo, hi = p.lb[j], p.ub[j]
        e = np.zeros(n)
        e[j] = 1.0
        if np.isfinite(lo):
            x0[j] = lo
            cols.append(e)
            if np.isfinite(hi):
                if hi < lo:
                    raise ValueError(f"variable {j}: upper bound below lower bound")
                bound_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            x0[j] = hi
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    T = np.array(cols).T if cols else np.zeros((n, 0))
    sign = 1.0 if p.sense == "min" else -1.0
    c_x = sign * p.c
    nz = T.shape[1]
    m_eq, m_ub, m_bd = p.A_eq.shape[0], p.A_ub.shape[0], len(bound_rows)
    n_slack = m_ub + m_bd
    A = np.zeros((m_eq + m_ub + m_bd, nz + n_slack))
    b = np.zeros(m_eq + m_ub + m_bd)
    A[:m_eq, :nz] = p.A_eq @ T
    b[:m_eq] = p.b_eq - p.A_eq @ x0
    A[m_eq : m_eq + m_ub, :nz] = p.A_ub @ T
    A[m_eq : m_eq + m_ub, nz : nz + m_ub] = np.eye(m_ub)
    b[m_eq : m_eq + m_ub] = p.b_ub - p.A_ub @ x0
    for k, (col, rhs) in enumerate(bound_rows):
        r = m_eq + m_ub + k
        A[r, col] = 1.0
        A[r, nz + m_ub + k] = 1.0
        b[r] = rhs
    c = np.concatenate([T.T @ c_x, np.zeros(n_slack)])
    T_full = np.hstack([T, np.zeros((n, n_slack))])
    kinds = ["eq"] * m_eq + ["ub"] * m_ub + ["bound"] * m_bd
    return StandardForm(c, A, b, T_full, x0, float(c_x @ x0), sign, kinds)


class _Tableau:
    """Row-reduced tableau ``[B^-1 A | B^-1 b]`` with Bland pivoting."""

    def __init__(self, A, b, basis):
        self.T = np.hstack([A, b[:, None]]).astype(float)
        self.basis = list(basis)
        self.pivots = 0

    def pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j
        self.pivots += 1
        if self.pivots > MAX_PIVOTS:
            raise _PivotCap()

    def run(self, cost, allowed):
        """Minimize ``cost @ z`` over the current basis; returns ('optimal'|'unbounded', j)."""
        T = self.T
        m = T.shape[0]
        scale = max(1.0, float(np.abs(cost).max()))
        while True:
            cb = cost[self.basis]
            reduced = cost - cb @ T[:, :-1]
            entering = None
            for j in np.flatnonzero(allowed):
                if reduced[j] < -PIVOT_TOL * scale:
                    entering = j
                    break
            if entering is None:
                return "optimal", None
            col = T[:, entering]
            ctol = RATIO_TOL * max(1.0, float(np.abs(col).max()))
            best, leave = None, None
            for r in range(m):
                if col[r] > ctol:
                    ratio = T[r, -1] / col[r]
                    if (
                        best is None
                        or ratio < best - 1e-12 * max(1.0, abs(best))
                        or (abs(ratio - best) <= 1e-12 * max(1.0, abs(best)) and self.basis[r] < self.basis[leave])
                    ):
                        best, leave = ratio, r
            if leave is None:
                return "unbounded", entering
            self.pivot(leave, entering)
            log.debug("simplex pivot %d: in %d, out row %d, obj %.12g", self.pivots, entering, leave, cb @ T[:, -1])


class _PivotCap(Exception):
    pass


def _duals(A, c, basis):
    B = A[:, basis]
    return np.linalg.solve(B.T, c[basis])


def _independent_rows(A, b):
    """Greedy independent row subset of ``A``; if a dropped row contradicts
    the kept ones, also return ``y`` with ``y @ A = 0`` and ``y @ b > 0``."""
    m, n = A.shape
    scale = max(1.0, float(np.abs(A).max()))
    if m <= n and m and np.abs(np.diag(np.linalg.qr(A.T, mode="r"))).min() > REDUNDANT_TOL * scale:
        return list(range(m)), None
    keep, Q = [], np.zeros((0, n))
    for r in range(m):
        resid = A[r] - Q.T @ (Q @ A[r])
        nrm = float(np.linalg.norm(resid))
        if nrm > REDUNDANT_TOL * scale:
            keep.append(r)
            Q = np.vstack([Q, resid / nrm])
    for r in sorted(set(range(m)) - set(keep)):
        coef = np.linalg.lstsq(A[keep].T, A[r], rcond=None)[0]
        y = np.zeros(m)
        y[r] = 1.0
        y[keep] = -coef
        gap = float(y @ b)
        if abs(gap) > 1e-9 * max(1.0, float(np.abs(b).max())) * max(1.0, float(np.abs(y).max())):
            return keep, y * np.sign(gap)
    return keep, None


def solve_standard(sf: StandardForm):
    """Two-phase simplex on a standard form. Returns a dict of raw results."""
    keep, farkas = _independent_rows(sf.A, sf.b)
    if farkas is not None:
        return {"status": "infeasible", "farkas": farkas, "pivots": 0}
    if len(keep) < sf.A.shape[0]:
        raw = _solve_independent(sf.A[keep], sf.b[keep], sf.c)
        for key in ("y", "farkas"):
            if key in raw:
                full = np.zeros(sf.A.shape[0])
                full[keep] = raw[key]
                raw[key] = full
        return raw
    return _solve_independent(sf.A, sf.b, sf.c)


def _solve_independent(A, b, c):
    A, b = A.copy(), b.copy()
    m, n = A.shape
    flip = np.where(b < 0, -1.0, 1.0)
    A *= flip[:, None]
    b *= flip
    # phase 1 with artificial columns n..n+m-1
    A1 = np.hstack([A, np.eye(m)])
    cost1 = np.concatenate([np.zeros(n), np.ones(m)])
    tab = _Tableau(A1, b, range(n, n + m))
    allowed = np.ones(n + m, dtype=bool)
    tab.run(cost1, allowed)
    phase1 = float(cost1[tab.basis] @ tab.T[:, -1])
    bscale = max(1.0, float(np.abs(b).max()))
    if phase1 > 1e-9 * bscale:
        y1 = np.linalg.solve(A1[:, tab.basis].T, cost1[tab.basis])
        y = flip * y1
        return {"status": "infeasible", "farkas": y, "pivots": tab.pivots}

    # drive zero-level artificials out of the basis; drop redundant rows
    keep_rows = []
    ascale = max(1.0, float(np.abs(A).max()))
    for r in range(m):
        if tab.basis[r] >= n:
            # pivot on the largest entry; a row of rounding noise is redundant
            row = np.abs(tab.T[r, :n])
            j = int(np.argmax(row))
            if row[j] > REDUNDANT_TOL * ascale:
                tab.pivot(r, j)
                keep_rows.append(r)
        else:
            keep_rows.append(r)
    T = tab.T[keep_rows][:, list(range(n)) + [-1]]
    basis = [tab.basis[r] for r in keep_rows]
    tab2 = _Tableau(np.zeros((len(keep_rows), n)), np.zeros(len(keep_rows)), basis)
    tab2.T = T
    tab2.pivots = tab.pivots
    rows = np.array(keep_rows, dtype=int)
    status, entering = tab2.run(c, np.ones(n, dtype=bool))
    basis = tab2.basis
    z = np.zeros(n)
    if basis:
        z[basis] = np.linalg.solve(A[rows][:, basis], b[rows])
        z[np.abs(z) < 1e-14] = 0.0
    if status == "unbounded":
        d = np.zeros(n)
        d[entering] = 1.0
        if basis:
            d[basis] = -tab2.T[:, entering]
        return {"status": "unbounded", "z": z, "ray": d, "pivots": tab2.pivots}
    y = np.zeros(m)
    if basis:
        y[rows] = _duals(A[rows], c, basis)
    y *= flip
    return {"status": "optimal", "z": z, "y": y, "pivots": tab2.pivots}


def solve_lp(p: LinearProgram) -> SolveReport:
    """Solve a linear program exactly up to floating point via simplex.

    ``primal`` is the solution ``x`` in the user's variables, ``dual`` the
    multipliers of the standard-form rows. ``certificate`` holds a Farkas
    vector ``y`` (``y @ A <= 0``, ``y @ b > 0`` on the standard form) when
    infeasible, or an improving ray in ``x`` coordinates when unbounded.
    """
    sf = to_standard_form(p)
    try:
        raw = solve_standard(sf)
    except _PivotCap:
        return SolveReport("numerical-failure", None, None, np.nan, np.nan, MAX_PIVOTS, extra={"standard_form": sf})
    extra = {"standard_form": sf}
    if raw["status"] == "infeasible":
        return SolveReport("infeasible", None, None, np.nan, np.nan, raw["pivots"], certificate=raw["farkas"], extra=extra)
    x = sf.T @ raw["z"] + sf.x0
    if raw["status"] == "unbounded":
        ray = sf.T @ raw["ray"]
        obj = -np.inf if p.sense == "min" else np.inf
        return SolveReport("unbounded", x, None, obj, np.nan, raw["pivots"], certificate=ray, extra=extra)
    y = raw["y"]
    primal_std = float(sf.c @ raw["z"])
    dual_std = float(sf.b @ y)
    obj = sf.sign * (primal_std + sf.offset)
    dual_obj = sf.sign * (dual_std + sf.offset)
    return SolveReport(
        "optimal", x, y, obj, abs(primal_std - dual_std), raw["pivots"], dual_objective=dual_obj, extra=extra
    )


def verify_farkas(report: SolveReport, tol: float = 1e-9) -> bool:
    """Check ``y @ A <= tol`` and ``y @ b > 0`` for an infeasibility certificate."""
    sf = report.extra["standard_form"]
    y = report.certificate
    if y is None:
        return False
    scale = max(1.0, float(np.abs(y).max()))
    return bool(np.all(y @ sf.A <= tol * scale) and y @ sf.b > tol * scale)
