"""Bivariate sextic polynomials as gambles ``v(x)^T G v(x)`` over real ``x``.

``v(x)`` is the vector of the ten monomials of degree at most three. A
polynomial is a sum of squares when some Gram matrix ``G`` of it is PSD, and
the moment matrix ``Z = L(v v^T)`` of a linear functional ``L`` has the
repeated-entry (Hankel-like) structure forced by ``v_i v_j = v_k v_l``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational

import numpy as np

from . import linalg
from .errors import NumericalFailure
from .solvers import SemidefiniteProgram, SolveReport, solve_sdp

BASIS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3))
D = len(BASIS)
MONOMIALS = tuple(sorted({(a[0] + b[0], a[1] + b[1]) for a in BASIS for b in BASIS}, key=lambda m: (sum(m), -m[0])))
STRUCT_TOL = 1e-9


def _cells():
    out = {}
    for i, j in itertools.product(range(D), repeat=2):
        m = (BASIS[i][0] + BASIS[j][0], BASIS[i][1] + BASIS[j][1])
        out.setdefault(m, []).append((i, j))
    return out


CELLS = _cells()


def _exact(c) -> bool:
    return isinstance(c, (Integral, Rational)) and not isinstance(c, bool)


class Poly2:
    """Polynomial in ``x1, x2`` as a map ``(alpha, beta) -> coefficient``.

    Integer and :class:`fractions.Fraction` coefficients are kept exact.
    """

    def __init__(self, coeffs=None):
        out = {}
        for (a, b), c in dict(coeffs or {}).items():
            a, b = int(a), int(b)
            if a < 0 or b < 0:
                raise ValueError("exponents must be nonnegative")
            if not _exact(c):
                c = float(c)
                if not np.isfinite(c):
                    raise ValueError("coefficients must be finite")
            if c != 0:
                out[(a, b)] = out.get((a, b), 0) + c
        self.coeffs = {m: c for m, c in out.items() if c != 0}

    @property
    def degree(self) -> int:
        return max((a + b for a, b in self.coeffs), default=0)

    @property
    def exact(self) -> bool:
        return all(_exact(c) for c in self.coeffs.values())

    def coeff(self, a: int, b: int):
        return self.coeffs.get((a, b), 0)

    def __neg__(self):
        return Poly2({m: -c for m, c in self.coeffs.items()})

    def __add__(self, other):
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return Poly2(out)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly2):
            return Poly2({m: c * other for m, c in self.coeffs.items()})
        out = {}
        for (a1, b1), c1 in self.coeffs.items():
            for (a2, b2), c2 in other.coeffs.items():
                m = (a1 + a2, b1 + b2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly2(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Poly2) and self.coeffs == other.coeffs

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        return sum(float(c) * x1**a * x2**b for (a, b), c in self.coeffs.items()) + 0.0 * x1 * x2

    def __repr__(self):
        terms = " + ".join(f"{c}·x1^{a}x2^{b}" for (a, b), c in sorted(self.coeffs.items()))
        return f"Poly2({terms or '0'})"

    def to_records(self) -> list:
        return [{"alpha": a, "beta": b, "coeff": c} for (a, b), c in sorted(self.coeffs.items())]

    @classmethod
    def from_records(cls, records):
        return cls({(int(r["alpha"]), int(r["beta"])): r["coeff"] for r in records})


X1 = Poly2({(1, 0): 1})
X2 = Poly2({(0, 1): 1})
ONE = Poly2({(0, 0): 1})


def motzkin() -> Poly2:
    """``x1^4 x2^2 + x1^2 x2^4 - x1^2 x2^2 + 1`` (minimum 26/27 at ``x_i^2 = 1/3``)."""
    return Poly2({(4, 2): 1, (2, 4): 1, (2, 2): -1, (0, 0): 1})


def poly_from_gram(G) -> Poly2:
    """Expand ``v(x)^T G v(x)``."""
    G = np.asarray(G) if not isinstance(G, list) else G
    rows = [list(r) for r in G]
    if len(rows) != D or any(len(r) != D for r in rows):
        raise ValueError("Gram matrices are 10x10")
    for i, j in itertools.combinations(range(D), 2):
        a, b = rows[i][j], rows[j][i]
        if a != b and not abs(float(a) - float(b)) <= STRUCT_TOL * max(1.0, abs(float(a))):
            raise ValueError("Gram matrix is not symmetric")
    out = {}
    for m, cells in CELLS.items():
        vals = [rows[i][j] for i, j in cells]
        if all(_exact(v) or isinstance(v, np.integer) for v in vals):
            out[m] = sum(Fraction(int(v)) if isinstance(v, np.integer) else v for v in vals)
        else:
            out[m] = float(sum(float(v) for v in vals))
    return Poly2(out)


def _check_degree(p: Poly2):
    for m in p.coeffs:
        if m not in CELLS:
            raise ValueError(f"monomial x1^{m[0]} x2^{m[1]} is outside the degree-6 space")


def gram_matrix(p: Poly2, spread: bool = False):
    """One Gram matrix of ``p`` (nested lists; exact entries stay exact).

    The default puts each coefficient on its first cell pair; ``spread``
    distributes it evenly over every cell with that monomial.
    """
    _check_degree(p)
    G = [[0] * D for _ in range(D)]
    for m, c in p.coeffs.items():
        cells = CELLS[m]
        if spread:
            share = Fraction(c) / len(cells) if _exact(c) else c / len(cells)
            for i, j in cells:
                G[i][j] = share
        else:
            i, j = cells[0]
            if i == j:
                G[i][i] = c
            else:
                half = Fraction(c) / 2 if _exact(c) else c / 2
                G[i][j] = G[j][i] = half
    return G


@dataclass(frozen=True, eq=False)
class MomentMatrixZ:
    """A 10x10 symmetric moment matrix with validated repeated-entry structure."""

    Z: np.ndarray

    def __init__(self, Z):
        arr = np.array(Z)
        if arr.shape != (D, D):
            raise ValueError("moment matrices are 10x10")
        if arr.dtype.kind not in "iuf":
            arr = arr.astype(float)
        if arr.dtype.kind == "f" and not np.all(np.isfinite(arr)):
            raise ValueError("moment matrix has non-finite entries")
        scale = max(1.0, float(np.abs(arr).max()))
        for m, cells in CELLS.items():
            vals = [arr[i, j] for i, j in cells]
            if arr.dtype.kind in "iu":
                ok = all(v == vals[0] for v in vals)
            else:
                ok = max(vals) - min(vals) <= STRUCT_TOL * scale
            if not ok:
                raise ValueError(f"structurally inconsistent: cells for x1^{m[0]} x2^{m[1]} disagree")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "Z", arr)

    @property
    def integral(self) -> bool:
        return self.Z.dtype.kind in "iu"

    def z(self, a: int, b: int):
        i, j = CELLS[(a, b)][0]
        v = self.Z[i, j]
        return int(v) if self.integral else float(v)

    def moments(self) -> dict:
        return {m: self.z(*m) for m in CELLS}


def _trace_product(G, Z: MomentMatrixZ):
    if Z.integral and all(_exact(v) for row in G for v in row):
        return sum(Fraction(G[i][j]) * int(Z.Z[j, i]) for i in range(D) for j in range(D))
    return float(sum(float(G[i][j]) * float(Z.Z[j, i]) for i in range(D) for j in range(D)))


def lb_evaluate(Z: MomentMatrixZ, p: Poly2):
    """``L(p) = Tr(G Z)`` for a Gram matrix ``G`` of ``p``.

    The value does not depend on the Gram matrix chosen; this is re-checked
    with a second Gram. Exact inputs (integer ``Z``, rational coefficients)
    give an exact result.
    """
    if not isinstance(Z, MomentMatrixZ):
        Z = MomentMatrixZ(Z)
    v1 = _trace_product(gram_matrix(p), Z)
    v2 = _trace_product(gram_matrix(p, spread=True), Z)
    if isinstance(v1, Fraction):
        assert v1 == v2
        return int(v1) if v1.denominator == 1 else v1
    assert abs(v1 - v2) <= 1e-9 * max(1.0, abs(v1))
    return v1


ZE = (
    (1, 0, 0, 353, 0, 353, 0, 0, 0, 0),
    (0, 353, 0, 0, 0, 0, 249572, 0, 66, 0),
    (0, 0, 353, 0, 0, 0, 0, 66, 0, 249572),
    (353, 0, 0, 249572, 0, 66, 0, 0, 0, 0),
    (0, 0, 0, 0, 66, 0, 0, 0, 0, 0),
    (353, 0, 0, 66, 0, 249572, 0, 0, 0, 0),
    (0, 249572, 0, 0, 0, 0, 706955894, 0, 17, 0),
    (0, 0, 66, 0, 0, 0, 0, 17, 0, 17),
    (0, 66, 0, 0, 0, 0, 17, 0, 17, 0),
    (0, 0, 249572, 0, 0, 0, 0, 17, 0, 706955894),
)


def exact_ldl_pivots(M) -> list:
    """Pivots of an exact rational LDL^T factorization without pivoting.

    All pivots positive proves ``M`` positive definite. Raises ``ValueError``
    if a zero pivot is met.
    """
    A = [[Fraction(int(v)) if isinstance(v, (int, np.integer)) else Fraction(v) for v in row] for row in M]
    n = len(A)
    pivots = []
    for k in range(n):
        p = A[k][k]
        if p == 0:
            raise ValueError("zero pivot")
        pivots.append(p)
        for i in range(k + 1, n):
            f = A[i][k] / p
            if f:
                for j in range(k + 1, n):
                    A[i][j] -= f * A[k][j]
    return pivots


def ze_matrix() -> MomentMatrixZ:
    """The integer moment matrix that gives the negated Motzkin polynomial value 31.

    Validated on construction: structure, ``z(0,0) = 1``, and positive
    definiteness (exact rational LDL^T pivots).
    """
    Z = MomentMatrixZ(np.array(ZE, dtype=np.int64))
    if Z.z(0, 0) != 1:
        raise ValueError("normalization slot must be 1")
    if min(exact_ldl_pivots(Z.Z)) <= 0:
        raise ValueError("matrix is not positive definite")
    return Z


def marginal_moment_matrix(Z: MomentMatrixZ, variable: int) -> np.ndarray:
    """Hankel matrix of the moments of ``x1`` (``variable=1``) or ``x2`` (``variable=2``)."""
    if variable not in (1, 2):
        raise ValueError("variable must be 1 or 2")
    mom = (lambda k: Z.z(k, 0)) if variable == 1 else (lambda k: Z.z(0, k))
    dtype = np.int64 if Z.integral else float
    return np.array([[mom(k + l) for l in range(4)] for k in range(4)], dtype=dtype)


def grid_min(p: Poly2, box: float = 2.0, steps: int = 400) -> float:
    """Minimum of ``p`` over a uniform ``(steps+1)^2`` grid on ``[-box, box]^2``.

    A probe, not a certificate: it bounds the true minimum from above.
    """
    if steps < 100:
        raise ValueError("steps must be at least 100")
    if not box > 0:
        raise ValueError("box half-width must be positive")
    t = np.linspace(-box, box, steps + 1)
    X1g, X2g = np.meshgrid(t, t, indexing="ij")
    return float(np.min(p(X1g, X2g)))


# exact Newton-polytope argument


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _in_hull(hull, q) -> bool:
    if len(hull) == 1:
        return tuple(q) == tuple(hull[0])
    if len(hull) == 2:
        a, b = hull
        return _cross(a, b, q) == 0 and min(a[0], b[0]) <= q[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= q[1] <= max(a[1], b[1])
    return all(_cross(hull[i], hull[(i + 1) % len(hull)], q) >= 0 for i in range(len(hull)))


def half_newton_support(p: Poly2) -> list:
    """Basis monomials ``s`` with ``2s`` in the Newton polygon of ``p``.

    Any Gram matrix of an SOS decomposition of ``p`` is supported on these.
    """
    if not p.coeffs:
        return []
    hull = _hull(list(p.coeffs))
    return [s for s in BASIS if _in_hull(hull, (2 * s[0], 2 * s[1]))]


@dataclass(frozen=True)
class ForcedDiagonal:
    monomial: tuple  # basis monomial s
    target: tuple  # 2s, only reachable as s + s within the support
    value: object  # forced Gram entry G_ss = coefficient of x^(2s)


def forced_diagonals(p: Poly2) -> list:
    """Gram diagonal entries fixed by ``p`` alone, over its half Newton support."""
    support = half_newton_support(p)
    out = []
    for s in support:
        t = (2 * s[0], 2 * s[1])
        pairs = [(a, b) for a in support for b in support if (a[0] + b[0], a[1] + b[1]) == t]
        if pairs == [(s, s)]:
            out.append(ForcedDiagonal(s, t, p.coeff(*t)))
    return out


def exact_non_sos_witness(p: Poly2) -> ForcedDiagonal | None:
    """A forced Gram diagonal that is negative, proving ``p`` is not SOS exactly."""
    if not p.exact:
        raise ValueError("exact test needs integer or rational coefficients")
    for f in forced_diagonals(p):
        if f.value < 0:
            return f
    return None


# SDP feasibility


def _pattern(m) -> np.ndarray:
    B = np.zeros((D, D))
    for i, j in CELLS[m]:
        B[i, j] = 1.0
    return B


@dataclass(frozen=True)
class SosResult:
    """Outcome of the Gram feasibility test.

    ``margin`` is ``t* = min L(p)`` over normalized (unit-trace) PSD moment
    matrices. ``gram`` is a PSD Gram certificate when ``sos``; otherwise
    ``moment`` is a PSD moment matrix ``Z`` with ``L(p) = Tr(G Z) < 0``
    for every Gram ``G`` of ``p``, i.e. a dual ray of the Gram system.
    """

    sos: bool
    margin: float
    gram: np.ndarray | None
    moment: np.ndarray | None
    report: SolveReport


def verify_moment_ray(p: Poly2, Z, tol: float = 1e-9) -> bool:
    """``Z`` PSD and ``L_Z(p) < 0``: then no PSD Gram matrix of ``p`` exists."""
    Z = np.asarray(Z, dtype=float)
    lam = linalg.eigvalsh(Z)
    scale = max(1.0, float(np.abs(Z).max()))
    Lp = sum(float(c) * sum(Z[j, i] for i, j in CELLS[m]) / len(CELLS[m]) for m, c in p.coeffs.items())
    return bool(lam[0] >= -tol * scale and Lp < -tol * scale)


def gram_sos_feasible(p: Poly2, tol: float = 1e-9) -> SosResult:
    """Decide whether ``p`` has a PSD Gram matrix.

    Solves ``min L(p)`` over unit-trace PSD moment matrices, whose optimum
    ``t*`` is nonnegative exactly when ``p`` is SOS (then ``G = X + t* I``
    is a Gram certificate). A negative optimum comes with its moment matrix
    as an infeasibility certificate, re-verified before returning.
    """
    _check_degree(p)
    others = [m for m in MONOMIALS if m != (0, 0)]
    B00 = _pattern((0, 0))
    p00 = float(p.coeff(0, 0))
    A, b = [], []
    for m in others:
        c = float(np.trace(_pattern(m)))
        A.append([-(_pattern(m) - c * B00)])
        b.append(-(float(p.coeff(*m)) - c * p00))
    rep = solve_sdp(SemidefiniteProgram([(D, "psd")], [B00], A, b))
    if rep.status != "optimal":
        raise NumericalFailure(f"SOS SDP ended with status {rep.status}")
    t = p00 - float(rep.dual_objective)
    if t >= -tol:
        X = np.real(rep.primal[0])
        G = 0.5 * (X + X.T) + max(t, 0.0) * np.eye(D)
        return SosResult(True, t, G, None, rep)
    Z = np.real(rep.extra["S"][0])
    Z = 0.5 * (Z + Z.T)
    if not verify_moment_ray(p, Z):
        raise NumericalFailure("moment certificate failed verification")
    return SosResult(False, t, None, Z, rep)


def gram_feasibility_sdp(p: Poly2) -> SemidefiniteProgram:
    """Raw Gram system: find ``G`` PSD with ``<B_m, G> = p_m`` for every monomial."""
    _check_degree(p)
    return SemidefiniteProgram(
        [(D, "psd")],
        [np.zeros((D, D))],
        [[_pattern(m)] for m in MONOMIALS],
        [float(p.coeff(*m)) for m in MONOMIALS],
    )
