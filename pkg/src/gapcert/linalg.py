"""Exact rational linear algebra on sparse rows.

Systems are given as lists of ``{column: Fraction}`` rows. Elimination is
fraction free: each row is scaled to integers and combined by integer cross
multiplication, dividing out the content after every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm


def _integer_row(row: dict, rhs) -> tuple[dict, int]:
    vals = list(row.values()) + [rhs]
    den = 1
    for v in vals:
        den = lcm(den, Fraction(v).denominator)
    irow = {c: int(Fraction(v) * den) for c, v in row.items() if v}
    return irow, int(Fraction(rhs) * den)


def _normalize(row: dict, rhs: int) -> tuple[dict, int]:
    g = abs(rhs)
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {c: v // g for c, v in row.items()}
        rhs //= g
    if row:
        lead = row[min(row)]
        if lead < 0:
            row = {c: -v for c, v in row.items()}
            rhs = -rhs
    return row, rhs


class Echelon:
    """Incremental integer row echelon form keyed by pivot column."""

    def __init__(self):
        self.pivots: dict[int, tuple[dict, int]] = {}
        self.inconsistent = False

    def add(self, row: dict, rhs=0) -> bool:
        """Insert a rational row; returns False if it reduced to 0 = nonzero."""
        r, b = _integer_row(row, rhs)
        while r:
            c = min(r)
            piv = self.pivots.get(c)
            if piv is None:
                r, b = _normalize(r, b)
                self.pivots[c] = (r, b)
                return True
            prow, pb = piv
            p, q = prow[c], r[c]
            g = gcd(p, q)
            mp, mq = q // g, p // g
            new = {}
            for k, v in r.items():
                new[k] = v * mq
            for k, v in prow.items():
                w = new.get(k, 0) - v * mp
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            b = b * mq - pb * mp
            r, b = _normalize(new, b)
        if b != 0:
            self.inconsistent = True
            return False
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def back_substitute(self, free_values=None) -> dict[int, Fraction]:
        """Solution with free columns set from ``free_values`` (default 0)."""
        x: dict[int, Fraction] = dict(free_values or {})
        for c in sorted(self.pivots, reverse=True):
            row, b = self.pivots[c]
            acc = Fraction(b)
            for k, v in row.items():
                if k != c:
                    xv = x.get(k)
                    if xv:
                        acc -= v * xv
            val = acc / row[c]
            if val:
                x[c] = val
            else:
                x.pop(c, None)
        return x


def solve(rows, rhs, ncols=None) -> dict[int, Fraction] | None:
    """One exact solution of ``rows . x = rhs`` (free variables zero), or None."""
    ech = Echelon()
    for row, b in zip(rows, rhs):
        if not ech.add(row, b):
            return None
    return ech.back_substitute()


def nullspace(rows, ncols: int) -> list[dict[int, Fraction]]:
    """Basis of {x : rows . x = 0}, one vector per free column (value 1 there)."""
    ech = Echelon()
    for row in rows:
        ech.add(row, 0)
    basis = []
    for f in range(ncols):
        if f in ech.pivots:
            continue
        basis.append(ech.back_substitute({f: Fraction(1)}))
    return basis


def rank(rows) -> int:
    ech = Echelon()
    for row in rows:
        ech.add(row, 0)
    return ech.rank


# ---- exact symmetric factorization ------------------------------------------------------

@dataclass
class LDLResult:
    psd: bool
    perm: list[int]
    L: list[list[Fraction]]  # unit lower triangular in permuted order
    D: list[Fraction]
    min_pivot: Fraction | None
    failed_at: int | None = None

    def terms(self):
        """Yield (weight, vector) with Q = sum weight * v v^T (original index order)."""
        n = len(self.perm)
        for k, d in enumerate(self.D):
            if d == 0:
                continue
            v = [Fraction(0)] * n
            for i in range(k, len(self.perm)):
                v[self.perm[i]] = self.L[i][k]
            yield d, v


def ldl_psd(Q) -> LDLResult:
    """Exact LDL^T with diagonal pivoting; decides positive semidefiniteness.

    At each step the largest remaining diagonal entry is chosen. A negative
    maximum means Q is not PSD; a zero maximum forces the remaining block to
    vanish entirely. The elimination runs fraction free on Q scaled to an
    integer matrix (Bareiss updates), so entries stay integers whose size
    grows linearly with the step count.
    """
    n = len(Q)
    den = 1
    for row in Q:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    A = [[int(Fraction(x) * den) for x in row] for row in Q]
    perm = list(range(n))
    cols: list[list[int]] = []  # integer column k of the reduced matrix, rows k..n-1
    prev = 1
    D: list[Fraction] = []
    for k in range(n):
        p = max(range(k, n), key=lambda i: A[i][i])
        if p != k:
            A[k], A[p] = A[p], A[k]
            for row in A:
                row[k], row[p] = row[p], row[k]
            perm[k], perm[p] = perm[p], perm[k]
            for c in cols:
                c[k], c[p] = c[p], c[k]
        piv = A[k][k]
        if piv < 0:
            return _ldl_result(False, perm, cols, D, n, Fraction(piv, prev * den), k)
        if piv == 0:
            for i in range(k, n):
                for j in range(k, n):
                    if A[i][j] != 0:
                        worst = Fraction(_most_negative(A, k), prev * den)
                        return _ldl_result(False, perm, cols, D, n, worst, k)
            D.extend([Fraction(0)] * (n - k))
            return _ldl_result(True, perm, cols, D, n, min(D) if D else None, None)
        D.append(Fraction(piv, prev * den))
        cols.append([0] * k + [A[i][k] for i in range(k, n)])
        Ak = A[k]
        for i in range(k + 1, n):
            Ai = A[i]
            aik = Ai[k]
            for j in range(k + 1, n):
                # Bareiss: exact division by the previous pivot
                Ai[j] = (piv * Ai[j] - aik * Ak[j]) // prev
        prev = piv
    return _ldl_result(True, perm, cols, D, n, min(D) if D else None, None)


def _ldl_result(psd, perm, cols, D, n, min_pivot, failed_at):
    L = [[Fraction(0)] * n for _ in range(n)]
    for k, c in enumerate(cols):
        piv = c[k]
        for i in range(k, n):
            if c[i]:
                L[i][k] = Fraction(c[i], piv)
    for k in range(len(cols), n):
        L[k][k] = Fraction(1)
    return LDLResult(psd, perm, L, list(D), min_pivot, failed_at)


def _most_negative(A, k):
    # 2x2 principal minor witness: a_ii a_jj - a_ij^2 < 0 with zero diagonal
    worst = 0
    n = len(A)
    for i in range(k, n):
        for j in range(k, n):
            if i != j and A[i][j]:
                worst = min(worst, -abs(A[i][j]))
    return worst
