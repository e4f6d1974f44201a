"""Rectangular matrices over a group ring and sums of hermitian squares."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DimMismatch, GroupMismatch
from .group import GroupDescriptor, GroupRingElement, parse_element


def _as_element(group, x) -> GroupRingElement:
    if isinstance(x, GroupRingElement):
        return x
    if isinstance(x, str):
        return parse_element(group, x)
    return GroupRingElement.one(group, x)


class GRMatrix:
    """Sparse ``rows x cols`` matrix with entries in R[G]. Treated as immutable."""

    __slots__ = ("group", "rows", "cols", "entries")

    def __init__(self, group: GroupDescriptor, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise DimMismatch("matrix dimensions must be nonnegative")
        self.group = group
        self.rows = rows
        self.cols = cols
        clean = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimMismatch(f"entry ({i},{j}) outside {rows}x{cols}")
            v = _as_element(group, v)
            if v.group is not group and v.group != group:
                raise GroupMismatch("entry from a different group")
            if v:
                clean[(i, j)] = v
        self.entries = clean

    @classmethod
    def _raw(cls, group, rows, cols, entries):
        obj = cls.__new__(cls)
        obj.group, obj.rows, obj.cols, obj.entries = group, rows, cols, entries
        return obj

    # -- constructors
    @classmethod
    def zeros(cls, group, rows, cols=None):
        return cls._raw(group, rows, rows if cols is None else cols, {})

    @classmethod
    def identity(cls, group, k):
        one = GroupRingElement.one(group)
        return cls._raw(group, k, k, {(i, i): one for i in range(k)})

    @classmethod
    def from_rows(cls, group, rows: Sequence[Sequence]) -> "GRMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        ent = {}
        for i, row in enumerate(rows):
            if len(row) != c:
                raise DimMismatch("ragged rows")
            for j, x in enumerate(row):
                ent[(i, j)] = x
        return cls(group, r, c, ent)

    @classmethod
    def scalar(cls, x: GroupRingElement) -> "GRMatrix":
        return cls(x.group, 1, 1, {(0, 0): x})

    @classmethod
    def diag(cls, group, items) -> "GRMatrix":
        items = list(items)
        return cls(group, len(items), len(items), {(i, i): x for i, x in enumerate(items)})

    @classmethod
    def unit(cls, group, rows, cols, i, j, key, value=1) -> "GRMatrix":
        return cls._raw(group, rows, cols,
                        {(i, j): GroupRingElement.from_element(group, key, value)})

    # -- access
    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij) -> GroupRingElement:
        e = self.entries.get(ij)
        return e if e is not None else GroupRingElement.zero(self.group)

    def is_zero(self) -> bool:
        return not self.entries

    def __bool__(self):
        return bool(self.entries)

    def __eq__(self, other):
        if not isinstance(other, GRMatrix):
            return NotImplemented
        if self.shape != other.shape or self.group != other.group:
            return False
        if self.entries.keys() != other.entries.keys():
            return False
        return all(self.entries[k].coeffs == other.entries[k].coeffs for k in self.entries)

    __hash__ = None

    def _check(self, other):
        if self.group is not other.group and self.group != other.group:
            raise GroupMismatch(f"{self.group!r} vs {other.group!r}")

    # -- linear structure
    def __add__(self, other):
        if not isinstance(other, GRMatrix):
            return NotImplemented
        self._check(other)
        if self.shape != other.shape:
            raise DimMismatch(f"cannot add {self.shape} and {other.shape}")
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out[k] + v if k in out else v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return GRMatrix._raw(self.group, self.rows, self.cols, out)

    def __neg__(self):
        return GRMatrix._raw(self.group, self.rows, self.cols,
                             {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "GRMatrix":
        c = Fraction(c)
        if not c:
            return GRMatrix.zeros(self.group, self.rows, self.cols)
        return GRMatrix._raw(self.group, self.rows, self.cols,
                             {k: v.scale(c) for k, v in self.entries.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, GroupRingElement):
            return GRMatrix._raw(self.group, self.rows, self.cols,
                                 _nonzero({k: v * other for k, v in self.entries.items()}))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, GroupRingElement):
            return GRMatrix._raw(self.group, self.rows, self.cols,
                                 _nonzero({k: other * v for k, v in self.entries.items()}))
        return NotImplemented

    def __matmul__(self, other):
        return mat_mul(self, other)

    def adjoint(self) -> "GRMatrix":
        return GRMatrix._raw(self.group, self.cols, self.rows,
                             {(j, i): v.star() for (i, j), v in self.entries.items()})

    @property
    def H(self) -> "GRMatrix":
        return self.adjoint()

    def is_hermitian(self) -> bool:
        return self.rows == self.cols and self.adjoint() == self

    def block(self, row_idx, col_idx) -> "GRMatrix":
        rmap = {r: a for a, r in enumerate(row_idx)}
        cmap = {c: b for b, c in enumerate(col_idx)}
        ent = {(rmap[i], cmap[j]): v for (i, j), v in self.entries.items()
               if i in rmap and j in cmap}
        return GRMatrix._raw(self.group, len(rmap), len(cmap), ent)

    # -- norms and support
    def l2sq(self) -> Fraction:
        return sum((v.norms()[1] for v in self.entries.values()), Fraction(0))

    def l1(self) -> Fraction:
        return sum((v.norms()[0] for v in self.entries.values()), Fraction(0))

    def support_radius(self) -> int:
        return max((v.support_radius() for v in self.entries.values()), default=0)

    def augmentation(self) -> list[list[Fraction]]:
        """Entrywise augmentation, i.e. the image under the trivial representation."""
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v.augmentation()
        return out

    def first_nonzero(self):
        """First nonzero coefficient as (i, j, word, value) in row-major order."""
        for (i, j) in sorted(self.entries):
            k, v = self.entries[(i, j)].items()[0]
            return (i, j, self.group.word(k), v)
        return None

    def __repr__(self):
        rows = []
        for i in range(self.rows):
            rows.append("[" + ", ".join(str(self[i, j]) for j in range(self.cols)) + "]")
        return f"GRMatrix({self.rows}x{self.cols}: " + "; ".join(rows) + ")"

    # -- serialization
    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [{"i": i, "j": j, "coeffs": self.entries[(i, j)].to_json()}
                            for (i, j) in sorted(self.entries)]}

    @classmethod
    def from_json(cls, group, d) -> "GRMatrix":
        ent = {(e["i"], e["j"]): GroupRingElement.from_json(group, e["coeffs"])
               for e in d.get("entries", [])}
        return cls(group, d["rows"], d["cols"], ent)


def _nonzero(ent):
    return {k: v for k, v in ent.items() if v}


def mat_mul(A: GRMatrix, B: GRMatrix) -> GRMatrix:
    A._check(B)
    if A.cols != B.rows:
        raise DimMismatch(f"cannot multiply {A.shape} by {B.shape}")
    by_row = {}
    for (k, j), v in B.entries.items():
        by_row.setdefault(k, []).append((j, v))
    acc = {}
    for (i, k), a in A.entries.items():
        for j, b in by_row.get(k, ()):
            p = a * b
            if (i, j) in acc:
                acc[(i, j)] = acc[(i, j)] + p
            else:
                acc[(i, j)] = p
    return GRMatrix._raw(A.group, A.rows, B.cols, _nonzero(acc))


def adjoint(A: GRMatrix) -> GRMatrix:
    return A.adjoint()


def hstack(blocks: Sequence[GRMatrix]) -> GRMatrix:
    group = blocks[0].group
    rows = blocks[0].rows
    ent, off = {}, 0
    for b in blocks:
        if b.rows != rows:
            raise DimMismatch("hstack needs equal row counts")
        for (i, j), v in b.entries.items():
            ent[(i, j + off)] = v
        off += b.cols
    return GRMatrix._raw(group, rows, off, ent)


def vstack(blocks: Sequence[GRMatrix]) -> GRMatrix:
    return hstack([b.adjoint() for b in blocks]).adjoint() if blocks else None


@dataclass
class SOSDecomposition:
    """Terms ``M_i`` (each ``r_i x k``) standing for ``sum_i w_i M_i^* M_i``.

    ``weights`` defaults to all ones; positive rational weights let exact LDL^T
    factorizations be stored without square roots.
    """

    terms: list[GRMatrix]
    target_cols: int
    weights: list[Fraction] | None = field(default=None)

    def __post_init__(self):
        for i, t in enumerate(self.terms):
            if t.cols != self.target_cols:
                raise DimMismatch(f"term {i} has {t.cols} columns, expected {self.target_cols}")
        if self.weights is not None:
            if len(self.weights) != len(self.terms):
                raise DimMismatch("one weight per term")
            self.weights = [Fraction(w) for w in self.weights]
            if any(w < 0 for w in self.weights):
                raise ValueError("weights must be nonnegative")


def sos_expand(dec: SOSDecomposition, group: GroupDescriptor | None = None) -> GRMatrix:
    if not dec.terms:
        if group is None:
            raise ValueError("empty decomposition needs an explicit group")
        return GRMatrix.zeros(group, dec.target_cols)
    k = dec.target_cols
    out = GRMatrix.zeros(dec.terms[0].group, k)
    weights = dec.weights or [Fraction(1)] * len(dec.terms)
    for M, w in zip(dec.terms, weights):
        if w:
            out = out + mat_mul(M.adjoint(), M).scale(w)
    return out


def frobenius_pairing(A: GRMatrix, B: GRMatrix) -> Fraction:
    """<A, B> = sum over entries and group elements of A_ij(g) B_ij(g)."""
    A._check(B)
    if A.shape != B.shape:
        raise DimMismatch(f"pairing needs equal shapes, got {A.shape} and {B.shape}")
    total = Fraction(0)
    for ij, a in A.entries.items():
        b = B.entries.get(ij)
        if b is None:
            continue
        for k, v in a.coeffs.items():
            w = b.coeffs.get(k)
            if w:
                total += v * w
    return total
