"""Positive functionals on M_k(R[G]), their GNS models, and the cocycle correspondence.

A functional is a finite table psi(E_ij(g)) of its values on matrix units
over a ball. Everything numerical here works in floating point with the
thresholds below; exact statements live in :mod:`gapcert.soscert`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .complex import D_apply, MatricialComplex, laplacian
from .errors import (MalformedInput, NotACocycle, NotPositive, NotVanishingOnImage,
                     SupportExceeded)
from .group import GroupDescriptor, ball
from .matrix import GRMatrix, mat_mul
from .oracle import FiniteDimRep, apply_rep

KERNEL_TOL = 1e-9
POSITIVE_TOL = 1e-9
VANISH_TOL = 1e-9


def _frac(x: float) -> Fraction:
    return Fraction(float(x)).limit_denominator(10**12)


def effective_radius(g: GroupDescriptor, radius: int) -> int:
    """Clamp a radius to the diameter for finite groups."""
    if g.is_finite:
        return min(radius, g.diameter)
    return radius


@dataclass
class PositiveFunctional:
    """psi(E_ij(g)) for matrix units of size k with g in ball(radius)."""

    group: GroupDescriptor
    k: int
    table: dict = field(default_factory=dict)  # (i, j, key) -> Fraction
    radius: int = 0
    hermitian: bool = True

    def __post_init__(self):
        self.table = {key: Fraction(v) for key, v in self.table.items() if v}
        if self.hermitian:
            g = self.group
            for (i, j, key), v in self.table.items():
                if self.table.get((j, i, g.inv(key)), 0) != v:
                    raise MalformedInput(f"table is not hermitian at ({i},{j},{g.word(key)})")

    def covers(self, key) -> bool:
        g = self.group
        return g.is_finite and self.radius >= g.diameter or g.length(key) <= self.radius

    def value(self, i, j, key) -> Fraction:
        if not self.covers(key):
            raise SupportExceeded(f"{self.group.word(key)} outside declared radius {self.radius}")
        return self.table.get((i, j, key), Fraction(0))

    def __call__(self, A: GRMatrix) -> Fraction:
        if A.shape != (self.k, self.k):
            raise MalformedInput(f"functional on {self.k}x{self.k}, got {A.shape}")
        total = Fraction(0)
        for (i, j), el in A.entries.items():
            for key, v in el.coeffs.items():
                total += v * self.value(i, j, key)
        return total

    def is_zero(self) -> bool:
        return not self.table

    def to_json(self):
        g = self.group
        entries = [{"i": i, "j": j, "word": g.word(key), "value": str(v)}
                   for (i, j, key), v in sorted(self.table.items(),
                                                key=lambda kv: (kv[0][0], kv[0][1],
                                                                g.sort_key(kv[0][2])))]
        return {"k": self.k, "entries": entries, "hermitian": self.hermitian,
                "radius": self.radius}

    @classmethod
    def from_json(cls, group, d):
        try:
            table = {(e["i"], e["j"], group.normalize(e["word"])): Fraction(e["value"])
                     for e in d["entries"]}
            return cls(group, d["k"], table, d.get("radius", 0), d.get("hermitian", True))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad functional JSON: {exc}") from exc


def load_functional(group, path) -> PositiveFunctional:
    with open(path) as fh:
        return PositiveFunctional.from_json(group, json.load(fh))


# ---- Gram matrix and GNS ---------------------------------------------------------------

def gns_basis(psi: PositiveFunctional, radius: int) -> list:
    keys = ball(psi.group, effective_radius(psi.group, radius))
    return [(j, g) for j in range(psi.k) for g in keys]


def gram_of_functional(psi: PositiveFunctional, radius: int) -> np.ndarray:
    """G[(j,g),(i,m)] = psi(E_ij(m^-1 g)) on the basis {(j, g) : g in ball(radius)}."""
    if not psi.hermitian:
        raise MalformedInput("Gram matrix needs a hermitian functional")
    g = psi.group
    basis = gns_basis(psi, radius)
    n = len(basis)
    G = np.zeros((n, n))
    for a, (j, x) in enumerate(basis):
        for b, (i, m) in enumerate(basis):
            G[a, b] = float(psi.value(i, j, g.mul(g.inv(m), x)))
    return G


@dataclass
class GNSModel:
    rep: FiniteDimRep
    cyclic: np.ndarray  # shape (k, dim)
    basis: list
    approximate: bool = False
    action_residual: float = 0.0

    @property
    def dim(self) -> int:
        return self.rep.dim

    def pairing(self, i, j, key) -> float:
        """<pi(g) c_j, c_i>."""
        if self.dim == 0:
            return 0.0
        return float(np.real(np.vdot(self.cyclic[i], self.rep.element(key) @ self.cyclic[j])))

    def evaluate(self, A: GRMatrix) -> float:
        if self.dim == 0:
            return 0.0
        c = self.cyclic.reshape(-1)
        return float(np.real(np.vdot(c, apply_rep(self.rep, A) @ c)))


def gns_construct(psi: PositiveFunctional, radius: int) -> GNSModel:
    """Quotient the Gram form by its kernel and let generators act by translation."""
    g = psi.group
    basis = gns_basis(psi, radius)
    G = gram_of_functional(psi, radius)
    if G.size == 0:
        ev, V = np.zeros(0), np.zeros((0, 0))
    else:
        ev, V = np.linalg.eigh(G)
    if ev.size and ev.min() < -POSITIVE_TOL:
        raise NotPositive(f"Gram matrix has eigenvalue {ev.min():.3e}", float(ev.min()))
    keep = ev > KERNEL_TOL
    m = int(keep.sum())
    F = (np.sqrt(ev[keep])[:, None] * V[:, keep].T) if m else np.zeros((0, len(basis)))
    index = {b: a for a, b in enumerate(basis)}
    # fix eigenvector signs so the cyclic vectors have a nonnegative leading entry
    cyc_cols = [index[(j, g.identity)] for j in range(psi.k)]
    for r in range(m):
        lead = next((F[r, c] for c in cyc_cols if abs(F[r, c]) > 1e-12), 0.0)
        if lead < 0:
            F[r] = -F[r]
    mats = {}
    approximate = False
    worst = 0.0
    for i, name in enumerate(g.generators):
        s = g.generator(i)
        src, dst = [], []
        for a, (j, x) in enumerate(basis):
            y = g.mul(s, x)
            if (j, y) in index:
                src.append(a)
                dst.append(index[(j, y)])
        if m == 0:
            mats[name] = np.zeros((0, 0))
            continue
        # translation is only pinned down if the translatable vectors span the model
        if not src or np.linalg.matrix_rank(F[:, src], tol=1e-7) < m:
            approximate = True
        A = F[:, dst] @ np.linalg.pinv(F[:, src]) if src else np.eye(m)
        res = float(np.max(np.abs(A @ F[:, src] - F[:, dst]), initial=0.0)) if src else 0.0
        orth = float(np.max(np.abs(A.T @ A - np.eye(m))))
        worst = max(worst, res, orth)
        if res > 1e-7 or orth > 1e-7:
            approximate = True
        mats[name] = A
    rep = FiniteDimRep(g, m, mats, "real", tol=np.inf)
    cyclic = F[:, cyc_cols].T.copy() if m else np.zeros((psi.k, 0))
    return GNSModel(rep, cyclic, basis, approximate, worst)


def reproduction_error(psi: PositiveFunctional, model: GNSModel, radius: int) -> float:
    """max |psi(E_ij(g)) - <pi(g) c_j, c_i>| over matrix units in ball(radius)."""
    g = psi.group
    worst = 0.0
    for key in ball(g, effective_radius(g, radius)):
        for i in range(psi.k):
            for j in range(psi.k):
                worst = max(worst, abs(float(psi.value(i, j, key)) - model.pairing(i, j, key)))
    return worst


# ---- cocycle correspondence -------------------------------------------------------------

def matrix_coefficients(rep: FiniteDimRep, vec, k: int, radius: int) -> PositiveFunctional:
    """Table psi(E_ij(g)) = <pi(g) v_j, v_i>, made exactly hermitian."""
    g = rep.group
    v = np.asarray(vec, dtype=rep.dtype).reshape(k, rep.dim) if rep.dim else np.zeros((k, 0))
    r = effective_radius(g, radius)
    table = {}
    for key in ball(g, r):
        M = rep.element(key)
        inv = g.inv(key)
        for i in range(k):
            for j in range(k):
                if (i, j, key) in table:
                    continue
                val = _frac(np.real(np.vdot(v[i], M @ v[j])))
                table[(i, j, key)] = val
                table[(j, i, inv)] = val
    return PositiveFunctional(g, k, table, r)


def functional_from_cocycle(rep: FiniteDimRep, z, C: MatricialComplex, n: int,
                            radius: int, tol: float = 1e-8) -> PositiveFunctional:
    """psi(a) = <pi(a) z, z>, the pullback phi o D_{n-1} of the functional attached to z."""
    k = C.dim(n)
    z = np.asarray(z, dtype=rep.dtype).reshape(-1)
    if z.size != k * rep.dim:
        raise MalformedInput(f"cocycle has length {z.size}, expected {k * rep.dim}")
    dz = apply_rep(rep, C.diff(n)) @ z
    scale = max(1.0, float(np.linalg.norm(z)))
    if dz.size and np.linalg.norm(dz) > tol * scale:
        raise NotACocycle(f"|pi(d_{n}) z| = {np.linalg.norm(dz):.3e}")
    return matrix_coefficients(rep, z, k, radius)


def cocycle_from_functional(psi: PositiveFunctional, C: MatricialComplex, n: int,
                            radius: int):
    """GNS model of psi whose cyclic vector is a cocycle, after checking psi kills Im D_n."""
    if psi.k != C.dim(n):
        raise MalformedInput(f"functional on {psi.k}x{psi.k}, k_{n} = {C.dim(n)}")
    lap = laplacian(C, n, "plus")
    v = psi(lap)
    if abs(v) > VANISH_TOL:
        raise NotVanishingOnImage(f"psi(Delta_{n}^+) = {v}", witness=lap, value=v)
    g = C.group
    m = C.dim(n + 1)
    dsup = C.diff(n).support_radius()
    r_img = psi.radius - 2 * dsup
    if g.is_finite and psi.radius >= g.diameter:
        r_img = g.diameter
    if r_img >= 0 and m:
        for key in ball(g, effective_radius(g, r_img)):
            for p in range(m):
                for q in range(m):
                    img = D_apply(C, n, GRMatrix.unit(g, m, m, p, q, key))
                    val = psi(img)
                    if abs(val) > VANISH_TOL:
                        raise NotVanishingOnImage(
                            f"psi(D_{n}(E_{p}{q}({g.word(key)}))) = {val}", witness=img, value=val)
    model = gns_construct(psi, radius)
    z = model.cyclic.reshape(-1)
    if model.dim:
        dz = apply_rep(model.rep, C.diff(n)) @ z
        if dz.size and np.linalg.norm(dz) > 1e-7 * max(1.0, np.linalg.norm(z)):
            model.approximate = True
    return model, z


@dataclass
class SCReport:
    violations: list  # (kind, p, q, word, value)
    checked: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self):
        return {"ok": self.ok, "checked": self.checked,
                "violations": [{"kind": k, "p": p, "q": q, "word": w, "value": str(v)}
                               for k, p, q, w, v in self.violations]}


def sc_vanishing_check(psi: PositiveFunctional, C: MatricialComplex, n: int,
                       radius: int | None = None, tol: float = VANISH_TOL) -> SCReport:
    """Evaluate psi on d_n^* X and Y d_n for matrix units X, Y over a ball."""
    g = C.group
    d = C.diff(n)
    dstar = d.adjoint()
    k, m = C.dim(n), C.dim(n + 1)
    if radius is None:
        radius = max(psi.radius - d.support_radius(), 0)
    violations = []
    checked = 0
    for key in ball(g, effective_radius(g, radius)):
        for p in range(m):
            for q in range(k):
                X = GRMatrix.unit(g, m, k, p, q, key)
                Y = GRMatrix.unit(g, k, m, q, p, key)
                for kind, A in (("d*x", mat_mul(dstar, X)), ("y d", mat_mul(Y, d))):
                    checked += 1
                    val = psi(A)
                    if abs(val) > tol:
                        violations.append((kind, p, q, g.word(key), val))
    return SCReport(violations, checked)


# ---- extension criterion -------------------------------------------------------------------

@dataclass
class ExtensionReport:
    verdict: str  # ExtensionFound | InfeasibleAtRadius | NumericallyInconclusive
    table: PositiveFunctional | None = None
    radius: int = 0
    method: str = ""
    detail: dict = field(default_factory=dict)

    def to_json(self):
        return {"verdict": self.verdict, "radius": self.radius, "method": self.method,
                "detail": self.detail,
                "table": self.table.to_json() if self.table is not None else None}


def _restriction_rows(C, n, r_img, big):
    """Rows expressing phibar(D_{n-1}(E_pq(g))) in terms of table keys over ball(big)."""
    g = C.group
    k = C.dim(n)
    rows = []
    for key in ball(g, effective_radius(g, r_img)):
        for p in range(k):
            for q in range(k):
                img = D_apply(C, n - 1, GRMatrix.unit(g, k, k, p, q, key))
                row = {}
                for (i, j), el in img.entries.items():
                    for h, v in el.coeffs.items():
                        if not g.is_finite and g.length(h) > big:
                            row = None
                            break
                        row[(i, j, h)] = row.get((i, j, h), 0) + v
                    if row is None:
                        break
                if row is not None:
                    rows.append(((p, q, key), row))
    return rows


def extend_functional(psi: PositiveFunctional, C: MatricialComplex, n: int, radius: int,
                      candidate: PositiveFunctional | None = None, solver: str | None = None,
                      tol: float = 1e-7) -> ExtensionReport:
    """Search for a positive hermitian phibar on M_{k_{n-1}} with phibar o D_{n-1} = psi.

    ``psi`` is the pullback table on M_{k_n}. Positivity is imposed through
    the Gram matrix on ball(radius), so the table lives on ball(2 radius).
    """
    if n < 1:
        raise MalformedInput("extension needs n >= 1")
    if psi.k != C.dim(n):
        raise MalformedInput(f"functional on {psi.k}x{psi.k}, k_{n} = {C.dim(n)}")
    g = C.group
    kk = C.dim(n - 1)
    big = effective_radius(g, 2 * radius)
    dsup = C.diff(n - 1).support_radius()
    r_img = min(psi.radius, big - 2 * dsup) if not g.is_finite else psi.radius
    rows = _restriction_rows(C, n, r_img, big) if r_img >= 0 else []
    target = {lab: float(psi.value(*lab[:2], lab[2])) for lab, _ in rows}
    detail = {"constraints": len(rows), "image_radius": r_img}

    if psi.is_zero():
        return ExtensionReport("ExtensionFound", PositiveFunctional(g, kk, {}, big), radius,
                               "zero", detail)

    if candidate is not None:
        err = max((abs(sum(float(v) * float(candidate.table.get(t, 0)) for t, v in row.items())
                       - target[lab]) for lab, row in rows), default=0.0)
        ev = np.linalg.eigvalsh(gram_of_functional(candidate, radius))
        detail.update(restriction_error=err, min_eigenvalue=float(ev.min()) if ev.size else 0.0)
        if err <= tol and (not ev.size or ev.min() >= -tol):
            return ExtensionReport("ExtensionFound", candidate, radius, "explicit", detail)

    import cvxpy as cp

    keys = ball(g, big)
    orbit = {}
    variables = []
    for key in keys:
        for i in range(kk):
            for j in range(kk):
                t = (i, j, key)
                if t in orbit:
                    continue
                mate = (j, i, g.inv(key))
                orbit[t] = orbit[mate] = len(variables)
                variables.append(t)
    x = cp.Variable(len(variables))
    probe = PositiveFunctional(g, kk, {}, big)
    basis = gns_basis(probe, radius)
    nb = len(basis)
    cols = {}
    for a, (j, y) in enumerate(basis):
        for b, (i, m) in enumerate(basis):
            t = (i, j, g.mul(g.inv(m), y))
            cols.setdefault(orbit[t], []).append((a, b))
    G = 0
    for var, pos in cols.items():
        P = np.zeros((nb, nb))
        for a, b in pos:
            P[a, b] = 1.0
        G = G + x[var] * P
    cons = [G >> 0]
    for lab, row in rows:
        expr = sum(float(v) * x[orbit[t]] for t, v in row.items())
        cons.append(expr == target[lab])
    prob = cp.Problem(cp.Minimize(cp.norm(x, 2)), cons)
    try:
        prob.solve(solver=solver or "CLARABEL")
    except cp.error.SolverError as exc:
        detail["solver_error"] = str(exc)
        return ExtensionReport("NumericallyInconclusive", None, radius, "sdp", detail)
    detail["solver_status"] = prob.status
    if prob.status in ("infeasible", "infeasible_inaccurate"):
        return ExtensionReport("InfeasibleAtRadius", None, radius, "sdp", detail)
    if x.value is None or prob.status not in ("optimal", "optimal_inaccurate"):
        return ExtensionReport("NumericallyInconclusive", None, radius, "sdp", detail)
    table = {}
    for var, t in enumerate(variables):
        val = _frac(x.value[var])
        table[t] = val
        table[(t[1], t[0], g.inv(t[2]))] = val
    found = PositiveFunctional(g, kk, table, big)
    err = max((abs(float(found(_to_matrix(g, kk, row))) - target[lab]) for lab, row in rows),
              default=0.0)
    ev = np.linalg.eigvalsh(gram_of_functional(found, radius))
    detail.update(restriction_error=err, min_eigenvalue=float(ev.min()) if ev.size else 0.0)
    if err <= tol and ev.min() >= -tol:
        return ExtensionReport("ExtensionFound", found, radius, "sdp", detail)
    return ExtensionReport("NumericallyInconclusive", found, radius, "sdp", detail)


def _to_matrix(g, k, row) -> GRMatrix:
    from .group import GroupRingElement
    ent = {}
    for (i, j, h), v in row.items():
        ent.setdefault((i, j), {})[h] = v
    return GRMatrix(g, k, k, {ij: GroupRingElement(g, c) for ij, c in ent.items()})


def factoring_check(psi: PositiveFunctional, C: MatricialComplex, n: int, radius: int) -> dict:
    """Empirical well-definedness on Im D_{n-1}: psi should vanish on ker D_{n-1}."""
    from .lift import kernel_basis
    basis = kernel_basis(C, n, radius)
    worst = Fraction(0)
    evaluated = 0
    for a in basis:
        if any(not psi.covers(k) for el in a.entries.values() for k in el.coeffs):
            continue
        evaluated += 1
        worst = max(worst, abs(psi(a)))
    return {"kernel_elements": len(basis), "evaluated": evaluated, "max_abs_value": str(worst),
            "factors": worst <= Fraction(VANISH_TOL)}
