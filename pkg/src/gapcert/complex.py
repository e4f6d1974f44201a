"""Matricial cochain complexes (k_n, d_n), Laplacians, the maps D_n, eta_k and box_n."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .errors import DegreeOutOfRange, DimMismatch, NormalFormUnavailable
from .group import GroupDescriptor, GroupRingElement, free_abelian
from .matrix import GRMatrix, mat_mul


@dataclass(frozen=True)
class MatricialComplex:
    """dims = (k_0, ..., k_N); diffs[n] = d_n has shape k_{n+1} x k_n.

    Outside the stored range the differentials are zero matrices with
    k_{-1} = k_{N+1} = 0, so d_N and d_{-1} exist and vanish.
    """

    group: GroupDescriptor
    dims: tuple[int, ...]
    diffs: tuple[GRMatrix, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "diffs", tuple(self.diffs))
        if len(self.diffs) != max(len(self.dims) - 1, 0):
            raise DimMismatch("need exactly len(dims) - 1 differentials")
        for n, d in enumerate(self.diffs):
            if d.shape != (self.dims[n + 1], self.dims[n]):
                raise DimMismatch(f"d_{n} has shape {d.shape}, expected "
                                  f"{(self.dims[n + 1], self.dims[n])}")

    @property
    def length(self) -> int:
        """Top degree N (number of stored differentials)."""
        return len(self.dims) - 1

    def dim(self, n: int) -> int:
        if 0 <= n < len(self.dims):
            return self.dims[n]
        return 0

    def diff(self, n: int) -> GRMatrix:
        if 0 <= n < len(self.diffs):
            return self.diffs[n]
        if n < -1 or n > self.length:
            raise DegreeOutOfRange(f"d_{n} outside complex of length {self.length}")
        return GRMatrix.zeros(self.group, self.dim(n + 1), self.dim(n))

    def _degree(self, n):
        if not 0 <= n <= self.length:
            raise DegreeOutOfRange(f"degree {n} outside 0..{self.length}")

    # serialization
    def to_json(self) -> dict:
        return {"name": self.name, "group": self.group.to_json(), "dims": list(self.dims),
                "diffs": [d.to_json() for d in self.diffs]}

    @classmethod
    def from_json(cls, d) -> "MatricialComplex":
        g = GroupDescriptor.from_json(d["group"])
        return cls(g, tuple(d["dims"]), tuple(GRMatrix.from_json(g, x) for x in d["diffs"]),
                   d.get("name", ""))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)


def load_complex(path) -> MatricialComplex:
    with open(path) as fh:
        return MatricialComplex.from_json(json.load(fh))


# ---- constructions ----------------------------------------------------------------

def fox_derivative(relator: str, gen: str, g: GroupDescriptor) -> GroupRingElement:
    """Fox derivative of a relator word with respect to a generator, mapped into R[G]."""
    target = g.generators.index(gen) if gen in g.generators else None
    if target is None:
        from .errors import UnknownSymbol
        raise UnknownSymbol(f"{gen!r} is not a generator")
    prefix = g.identity
    out = {}
    for i, e in g.letters_of_word(relator):
        sign = 1 if e > 0 else -1
        step = g.generator(i, sign)
        for _ in range(abs(e)):
            if i == target:
                if sign > 0:
                    # d(x)/dx = 1, contributes prefix
                    out[prefix] = out.get(prefix, 0) + 1
                else:
                    # d(x^-1)/dx = -x^-1, contributes -prefix x^-1
                    k = g.mul(prefix, step)
                    out[k] = out.get(k, 0) - 1
            prefix = g.mul(prefix, step)
    return GroupRingElement(g, out)


def from_presentation(g: GroupDescriptor, name: str = "") -> MatricialComplex:
    if not g.has_normal_form:
        raise NormalFormUnavailable(f"{g!r} has relators but only a free normal form")
    one = GroupRingElement.one(g)
    gens = g.generators
    d0 = GRMatrix(g, len(gens), 1,
                  {(i, 0): one - GroupRingElement.from_element(g, g.generator(i)) for i in
                   range(len(gens))})
    dims = [1, len(gens)]
    diffs = [d0]
    if g.relators:
        d1 = GRMatrix(g, len(g.relators), len(gens),
                      {(r, i): fox_derivative(rel, x, g)
                       for r, rel in enumerate(g.relators) for i, x in enumerate(gens)})
        dims.append(len(g.relators))
        diffs.append(d1)
    return MatricialComplex(g, tuple(dims), tuple(diffs), name or g.name)


def from_koszul(d: int, group: GroupDescriptor | None = None) -> MatricialComplex:
    """Koszul resolution of Z^d; entry for I -> I u {i} is (-1)^{#{j in I, j < i}} (1 - s_i)."""
    if d < 1:
        raise ValueError("rank must be >= 1")
    g = group or free_abelian(d)
    if g.normal_form != "abelian" or g.rank != d:
        raise ValueError("Koszul complex needs the rank-d free abelian descriptor")
    one = GroupRingElement.one(g)
    faces = [list(combinations(range(d), n)) for n in range(d + 1)]
    index = [{I: a for a, I in enumerate(fs)} for fs in faces]
    diffs = []
    for n in range(d):
        ent = {}
        for col, I in enumerate(faces[n]):
            for i in range(d):
                if i in I:
                    continue
                J = tuple(sorted(I + (i,)))
                sign = -1 if sum(1 for j in I if j < i) % 2 else 1
                ent[(index[n + 1][J], col)] = (one - GroupRingElement.from_element(
                    g, g.generator(i))).scale(sign)
        diffs.append(GRMatrix(g, len(faces[n + 1]), len(faces[n]), ent))
    return MatricialComplex(g, tuple(comb(d, n) for n in range(d + 1)), tuple(diffs),
                            f"koszul{d}")


# ---- validation ---------------------------------------------------------------------

@dataclass
class ComplexReport:
    failures: list = field(default_factory=list)  # (n, witness GRMatrix of d_{n+1} d_n)

    @property
    def valid(self) -> bool:
        return not self.failures

    def to_json(self):
        return {"valid": self.valid,
                "failures": [{"n": n, "witness": w.to_json()} for n, w in self.failures]}


def check_complex(C: MatricialComplex) -> ComplexReport:
    rep = ComplexReport()
    for n in range(len(C.diffs) - 1):
        prod = mat_mul(C.diffs[n + 1], C.diffs[n])
        if not prod.is_zero():
            rep.failures.append((n, prod))
    return rep


# ---- Laplacians and friends ------------------------------------------------------------

def laplacian(C: MatricialComplex, n: int, kind: str = "full") -> GRMatrix:
    C._degree(n)
    if kind == "plus":
        d = C.diff(n)
        return mat_mul(d.adjoint(), d)
    if kind == "minus":
        d = C.diff(n - 1)
        return mat_mul(d, d.adjoint())
    if kind == "full":
        return laplacian(C, n, "plus") + laplacian(C, n, "minus")
    raise ValueError(f"unknown Laplacian kind {kind!r}")


def D_apply(C: MatricialComplex, n: int, a: GRMatrix) -> GRMatrix:
    """D_n(a) = d_n^* a d_n for a of size k_{n+1}."""
    if not -1 <= n <= C.length:
        raise DegreeOutOfRange(f"D_{n} outside complex of length {C.length}")
    d = C.diff(n)
    if a.shape != (d.rows, d.rows):
        raise DimMismatch(f"D_{n} expects a {d.rows}x{d.rows} matrix, got {a.shape}")
    return mat_mul(mat_mul(d.adjoint(), a), d)


def delta0(C: MatricialComplex) -> GroupRingElement:
    if C.length < 1:
        raise DegreeOutOfRange("complex has no d_0")
    return laplacian(C, 0, "plus")[0, 0]


def eta(C: MatricialComplex, k: int) -> GRMatrix:
    """diag(Delta_0, ..., Delta_0) of size k."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return GRMatrix.zeros(C.group, 0)
    return GRMatrix.diag(C.group, [delta0(C)] * k)


def box(C: MatricialComplex, n: int) -> GRMatrix:
    """d_n^* eta_{k_{n+1}} d_n."""
    C._degree(n)
    return D_apply(C, n, eta(C, C.dim(n + 1)))
