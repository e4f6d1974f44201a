"""Truncated exact solvers: one-sided lifts, split conjugation, Im D membership.

Every solver searches for unknown matrices whose entries are supported on
``ball(radius)``, assembles the linear system exactly and solves it by
fraction-free elimination. Failing to find a solution up to the maximal
radius raises :class:`RadiusExhausted`, which is a statement about the
search only. :func:`im_D_membership` can additionally return a genuine
``proven_infeasible`` verdict over Z^d, where Laurent rings are integral
domains.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .complex import D_apply, MatricialComplex
from .errors import DimMismatch, PreconditionFailed, RadiusExhausted
from .group import GroupDescriptor, GroupRingElement, ball
from .linalg import Echelon, nullspace
from .matrix import GRMatrix, SOSDecomposition, mat_mul, sos_expand


@dataclass(frozen=True)
class TruncationPolicy:
    """Radius schedule. ``None`` means derived from the input support."""

    initial_radius: int | None = None
    max_radius: int | None = None
    slack: int = 3

    def __post_init__(self):
        if self.initial_radius is not None and self.initial_radius < 0:
            raise ValueError("initial_radius must be >= 0")
        if (self.initial_radius is not None and self.max_radius is not None
                and self.max_radius < self.initial_radius):
            raise ValueError("max_radius must be >= initial_radius")

    def radii(self, support: int, operator_support: int = 1) -> range:
        lo = self.initial_radius
        if lo is None:
            lo = max(0, support - operator_support)
        hi = self.max_radius
        if hi is None:
            hi = max(lo, support + self.slack)
        return range(lo, hi + 1)


DEFAULT_POLICY = TruncationPolicy()


# ---- generic truncated linear solve ---------------------------------------------------

def _as_tuple(out):
    return out if isinstance(out, tuple) else (out,)


def assemble(group: GroupDescriptor, shapes: Sequence[tuple[int, int]], fn: Callable,
             radius: int):
    """Columns and equations of the linear map ``fn`` restricted to ball(radius) unknowns.

    Returns ``(columns, equations)`` where columns[c] = (unknown, i, j, key) and
    equations maps (output, i, j, key) -> {column: coefficient}.
    """
    keys = ball(group, radius)
    zeros = [GRMatrix.zeros(group, r, c) for r, c in shapes]
    columns = []
    eqs: dict = {}
    for u, (r, c) in enumerate(shapes):
        for i in range(r):
            for j in range(c):
                for key in keys:
                    col = len(columns)
                    columns.append((u, i, j, key))
                    args = list(zeros)
                    args[u] = GRMatrix.unit(group, r, c, i, j, key)
                    for o, M in enumerate(_as_tuple(fn(*args))):
                        for (p, q), el in M.entries.items():
                            for g, v in el.coeffs.items():
                                eqs.setdefault((o, p, q, g), {})[col] = v
    return columns, eqs


def _unpack(group, shapes, columns, x) -> list[GRMatrix]:
    acc = [dict() for _ in shapes]
    for col, v in x.items():
        u, i, j, key = columns[col]
        acc[u].setdefault((i, j), {})[key] = v
    return [GRMatrix(group, r, c, {ij: GroupRingElement(group, co) for ij, co in a.items()})
            for (r, c), a, in zip(shapes, acc)]


def truncated_solve(group, shapes, fn, target, radius) -> list[GRMatrix] | None:
    """Solve fn(*unknowns) == target with unknowns supported in ball(radius)."""
    targets = _as_tuple(target)
    columns, eqs = assemble(group, shapes, fn, radius)
    rhs = {}
    for o, T in enumerate(targets):
        for (p, q), el in T.entries.items():
            for g, v in el.coeffs.items():
                key = (o, p, q, g)
                if key not in eqs:
                    return None  # target coefficient no unknown can reach
                rhs[key] = v
    ech = Echelon()
    for key in sorted(eqs, key=lambda k: (k[0], k[1], k[2], group.sort_key(k[3]))):
        if not ech.add(eqs[key], rhs.get(key, 0)):
            return None
    return _unpack(group, shapes, columns, ech.back_substitute())


def truncated_kernel(group, shapes, fn, radius) -> list[list[GRMatrix]]:
    columns, eqs = assemble(group, shapes, fn, radius)
    basis = nullspace(list(eqs.values()), len(columns))
    return [_unpack(group, shapes, columns, v) for v in basis]


# ---- one-sided lifts ------------------------------------------------------------------

def left_lift(C: MatricialComplex, n: int, a: GRMatrix,
              pol: TruncationPolicy = DEFAULT_POLICY) -> GRMatrix:
    """b with a = d_n^* b, for a (k_n x j) satisfying d_{n-1}^* a = 0."""
    d = C.diff(n)
    if a.rows != C.dim(n):
        raise DimMismatch(f"left_lift at degree {n} expects {C.dim(n)} rows, got {a.rows}")
    if n >= 1:
        w = mat_mul(C.diff(n - 1).adjoint(), a)
        if not w.is_zero():
            raise PreconditionFailed(f"d_{n - 1}^* a != 0", witness=w)
    shape = (C.dim(n + 1), a.cols)
    if a.is_zero():
        return GRMatrix.zeros(C.group, *shape)
    dstar = d.adjoint()
    radii = pol.radii(a.support_radius(), d.support_radius())
    for r in radii:
        sol = truncated_solve(C.group, [shape], lambda b: mat_mul(dstar, b), a, r)
        if sol is not None:
            b = sol[0]
            assert mat_mul(dstar, b) == a
            return b
    raise RadiusExhausted(f"no left lift at degree {n} up to radius {radii[-1]}", radii[-1])


def right_lift(C: MatricialComplex, n: int, a: GRMatrix,
               pol: TruncationPolicy = DEFAULT_POLICY) -> GRMatrix:
    """b with a = b d_n, for a (j x k_n) satisfying a d_{n-1} = 0."""
    d = C.diff(n)
    if a.cols != C.dim(n):
        raise DimMismatch(f"right_lift at degree {n} expects {C.dim(n)} columns, got {a.cols}")
    if n >= 1:
        w = mat_mul(a, C.diff(n - 1))
        if not w.is_zero():
            raise PreconditionFailed(f"a d_{n - 1} != 0", witness=w)
    shape = (a.rows, C.dim(n + 1))
    if a.is_zero():
        return GRMatrix.zeros(C.group, *shape)
    radii = pol.radii(a.support_radius(), d.support_radius())
    for r in radii:
        sol = truncated_solve(C.group, [shape], lambda b: mat_mul(b, d), a, r)
        if sol is not None:
            b = sol[0]
            assert mat_mul(b, d) == a
            return b
    raise RadiusExhausted(f"no right lift at degree {n} up to radius {radii[-1]}", radii[-1])


# ---- split conjugation ----------------------------------------------------------------

@dataclass
class SCDecomposition:
    x: GRMatrix  # k_{i+1} x k_i
    y: GRMatrix  # k_i x k_{i+1}
    method: str = "direct"

    def recompose(self, C: MatricialComplex, i: int) -> GRMatrix:
        d = C.diff(i)
        return mat_mul(d.adjoint(), self.x) + mat_mul(self.y, d)


def telescoping_applies(C: MatricialComplex, i: int) -> bool:
    return 2 * i >= C.length + 1


def sc_decompose(C: MatricialComplex, i: int, a: GRMatrix,
                 pol: TruncationPolicy = DEFAULT_POLICY, method: str = "auto") -> SCDecomposition:
    """Write a = d_i^* x + y d_i for a in ker D_{i-1}."""
    k = C.dim(i)
    if a.shape != (k, k):
        raise DimMismatch(f"sc_decompose at {i} expects {k}x{k}, got {a.shape}")
    if i >= 1:
        w = D_apply(C, i - 1, a)
        if not w.is_zero():
            raise PreconditionFailed(f"D_{i - 1}(a) != 0", witness=w)
    if method == "auto":
        method = "telescoping" if telescoping_applies(C, i) else "direct"
    if method == "telescoping":
        if not telescoping_applies(C, i):
            raise ValueError(f"telescoping needs 2i >= N+1 (i={i}, N={C.length})")
        dec = _telescope(C, i, a, pol)
    elif method == "direct":
        dec = _direct_sc(C, i, a, pol)
    else:
        raise ValueError(f"unknown method {method!r}")
    if dec.recompose(C, i) != a:
        raise AssertionError("split conjugation recomposition failed")
    return dec


def _direct_sc(C, i, a, pol):
    d = C.diff(i)
    dstar = d.adjoint()
    shapes = [(C.dim(i + 1), C.dim(i)), (C.dim(i), C.dim(i + 1))]
    if a.is_zero():
        return SCDecomposition(GRMatrix.zeros(C.group, *shapes[0]),
                               GRMatrix.zeros(C.group, *shapes[1]), "direct")
    radii = pol.radii(a.support_radius(), d.support_radius())
    for r in radii:
        sol = truncated_solve(C.group, shapes, lambda x, y: mat_mul(dstar, x) + mat_mul(y, d),
                              a, r)
        if sol is not None:
            return SCDecomposition(sol[0], sol[1], "direct")
    raise RadiusExhausted(f"no split conjugation decomposition up to radius {radii[-1]}",
                          radii[-1])


def _telescope(C, i, a, pol):
    N = C.length
    seq = [a]
    # a_j d_{i-j-1} = d_{i+j}^* a_{j+1}
    for j in range(N - i):
        lhs = mat_mul(seq[j], C.diff(i - j - 1))
        seq.append(left_lift(C, i + j, lhs, pol))
    # top: a_{N-i} d_{2i-N-1} = 0 because d_N = 0, so a_{N-i} = b_{N-i} d_{2i-N}
    b = {N - i: right_lift(C, 2 * i - N, seq[N - i], pol)}
    for j in range(N - i - 1, -1, -1):
        rem = seq[j] - mat_mul(C.diff(i + j).adjoint(), b[j + 1])
        b[j] = right_lift(C, i - j, rem, pol)
    x = b.get(1, GRMatrix.zeros(C.group, C.dim(i + 1), C.dim(i)))
    return SCDecomposition(x, b[0], "telescoping")


# ---- Im D membership --------------------------------------------------------------------

@dataclass
class Membership:
    status: str  # witness | infeasible_at_radius | proven_infeasible
    witness: GRMatrix | None = None
    radius: int | None = None
    reason: str = ""

    def to_json(self):
        data = {"radius": self.radius, "reason": self.reason}
        if self.witness is not None:
            data["witness"] = self.witness.to_json()
        return {"status": self.status, "data": data}


def laurent_divide(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement | None:
    """Exact quotient a / b in the Laurent ring R[Z^d], or None if b does not divide a.

    The quotient's exponents in each variable must lie between
    min(a) - min(b) and max(a) - max(b), so solving on that box is a proof.
    """
    g = a.group
    if g.normal_form != "abelian":
        raise ValueError("Laurent division needs a free abelian group")
    if b.is_zero():
        raise ZeroDivisionError("division by zero element")
    if a.is_zero():
        return GroupRingElement.zero(g)
    d = g.rank
    lo, hi = [], []
    for t in range(d):
        ea = [k[t] for k in a.coeffs]
        eb = [k[t] for k in b.coeffs]
        lo.append(min(ea) - min(eb))
        hi.append(max(ea) - max(eb))
        if lo[-1] > hi[-1]:
            return None
    from itertools import product
    box = list(product(*[range(l, h + 1) for l, h in zip(lo, hi)]))
    eqs: dict = {}
    for c, q in enumerate(box):
        for k, v in b.coeffs.items():
            eqs.setdefault(g.mul(q, k), {})[c] = v
    if any(k not in eqs for k in a.coeffs):
        return None
    ech = Echelon()
    for key, row in eqs.items():
        if not ech.add(row, a.coeffs.get(key, 0)):
            return None
    x = ech.back_substitute()
    q = GroupRingElement(g, {box[c]: v for c, v in x.items()})
    return q if q * b == a else None


def _abelian_scalar_membership(C, n, a) -> Membership:
    # D_n(xi)_{pq} = xi * d_p^* d_q in a commutative domain: xi is forced.
    d = C.diff(n)
    row = [d[0, j] for j in range(d.cols)]
    for p in range(d.cols):
        for q in range(d.cols):
            coef = row[p].star() * row[q]
            if coef.is_zero():
                continue
            xi = laurent_divide(a[p, q], coef)
            if xi is None:
                return Membership("proven_infeasible",
                                  reason=f"entry ({p},{q}) not divisible by d_p^* d_q")
            cand = GRMatrix.scalar(xi) if xi else GRMatrix.zeros(C.group, 1)
            if D_apply(C, n, cand) == a:
                return Membership("witness", cand, reason="exact Laurent division")
            return Membership("proven_infeasible",
                              reason=f"entry ({p},{q}) forces xi = {xi}, which does not "
                                     "reproduce the remaining entries")
    return Membership("proven_infeasible" if not a.is_zero() else "witness",
                      GRMatrix.zeros(C.group, 1) if a.is_zero() else None,
                      reason="d_n vanishes")


def im_D_membership(C: MatricialComplex, n: int, a: GRMatrix,
                    pol: TruncationPolicy = DEFAULT_POLICY, shortcut: bool = True) -> Membership:
    k = C.dim(n)
    m = C.dim(n + 1)
    if a.shape != (k, k):
        raise DimMismatch(f"expected {k}x{k}, got {a.shape}")
    if a.is_zero():
        return Membership("witness", GRMatrix.zeros(C.group, m), 0)
    if shortcut and C.group.normal_form == "abelian" and m == 1:
        res = _abelian_scalar_membership(C, n, a)
        if res.witness is not None:
            assert D_apply(C, n, res.witness) == a
        return res
    d = C.diff(n)
    radii = pol.radii(a.support_radius(), 2 * d.support_radius())
    for r in radii:
        sol = truncated_solve(C.group, [(m, m)], lambda xi: D_apply(C, n, xi), a, r)
        if sol is not None:
            assert D_apply(C, n, sol[0]) == a
            return Membership("witness", sol[0], r)
    return Membership("infeasible_at_radius", radius=radii[-1],
                      reason="truncated search only; not a proof")


# ---- constructive SOS preimage -------------------------------------------------------------

def sos_preimage(C: MatricialComplex, n: int, dec: SOSDecomposition,
                 pol: TruncationPolicy = DEFAULT_POLICY) -> SOSDecomposition:
    """Rewrite sum M_i^* M_i in ker D_{n-1} as D_n(sum b_i^* b_i) with M_i = b_i d_n."""
    if dec.target_cols != C.dim(n):
        raise DimMismatch(f"decomposition has {dec.target_cols} columns, k_{n} = {C.dim(n)}")
    if n >= 1:
        dprev = C.diff(n - 1)
        for idx, M in enumerate(dec.terms):
            w = mat_mul(M, dprev)
            if not w.is_zero():
                raise PreconditionFailed(f"term {idx}: M d_{n - 1} != 0", witness=w, index=idx)
    lifted = [right_lift(C, n, M, pol) for M in dec.terms]
    out = SOSDecomposition(lifted, C.dim(n + 1), dec.weights)
    if dec.terms:
        lhs = D_apply(C, n, sos_expand(out))
        if lhs != sos_expand(dec):
            raise AssertionError("SOS preimage recomposition failed")
    return out


# ---- kernel sampling (exploration) -------------------------------------------------------------

def kernel_basis(C: MatricialComplex, n: int, radius: int, diagonal: bool = False,
                 hermitian: bool = False) -> list[GRMatrix]:
    """Truncated basis of ker D_{n-1} on k_n x k_n matrices supported in ball(radius)."""
    k = C.dim(n)
    g = C.group
    if diagonal:
        def fn(*diag):
            a = GRMatrix.diag(g, [x[0, 0] for x in diag])
            return D_apply(C, n - 1, a)
        vecs = truncated_kernel(g, [(1, 1)] * k, fn, radius)
        out = [GRMatrix.diag(g, [x[0, 0] for x in v]) for v in vecs]
    else:
        out = [v[0] for v in truncated_kernel(g, [(k, k)], lambda a: D_apply(C, n - 1, a),
                                              radius)]
    if hermitian:
        herm = []
        ech = None
        for a in out:
            h = a + a.adjoint()
            if h.is_zero():
                continue
            herm.append(h.scale(Fraction(1, 2)))
        out = _independent(herm)
    return out


def _independent(mats: list[GRMatrix]) -> list[GRMatrix]:
    ech = Echelon()
    index: dict = {}
    keep = []
    for M in mats:
        row = {}
        for (i, j), el in M.entries.items():
            for g, v in el.coeffs.items():
                col = index.setdefault((i, j, g), len(index))
                row[col] = v
        before = ech.rank
        ech.add(row, 0)
        if ech.rank > before:
            keep.append(M)
    return keep


def random_kernel_elements(C: MatricialComplex, n: int, radius: int, count: int,
                           seed: int = 0, coeff_range: int = 3) -> list[GRMatrix]:
    """Seeded random integer combinations of a truncated ker D_{n-1} basis."""
    basis = kernel_basis(C, n, radius)
    rng = random.Random(seed)
    out = []
    if not basis:
        return [GRMatrix.zeros(C.group, C.dim(n)) for _ in range(count)]
    for _ in range(count):
        acc = GRMatrix.zeros(C.group, C.dim(n))
        picks = rng.sample(range(len(basis)), min(len(basis), rng.randint(1, 4)))
        for p in picks:
            c = rng.choice([x for x in range(-coeff_range, coeff_range + 1) if x])
            acc = acc + basis[p].scale(c)
        out.append(acc)
    return out


def verdict_json(outcome) -> dict:
    """Serialize any solver outcome (result object or raised error) as a verdict."""
    if isinstance(outcome, Membership):
        return outcome.to_json()
    if isinstance(outcome, PreconditionFailed):
        w = outcome.witness
        return {"status": "precondition_failed",
                "data": {"message": str(outcome), "index": outcome.index,
                         "witness": w.to_json() if isinstance(w, GRMatrix) else None}}
    if isinstance(outcome, RadiusExhausted):
        return {"status": "infeasible_at_radius", "data": {"radius": outcome.radius}}
    if isinstance(outcome, SCDecomposition):
        return {"status": "witness", "data": {"x": outcome.x.to_json(),
                                              "y": outcome.y.to_json(),
                                              "method": outcome.method}}
    if isinstance(outcome, SOSDecomposition):
        return {"status": "witness", "data": {"terms": [t.to_json() for t in outcome.terms]}}
    if isinstance(outcome, GRMatrix):
        return {"status": "witness", "data": outcome.to_json()}
    raise TypeError(f"cannot serialize {type(outcome).__name__}")
