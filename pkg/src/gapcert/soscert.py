"""Gram-matrix SDP formulation, rounding and exact verification of Sigma^2 certificates.

Supported targets, with ``s`` the objective scalar:

============  ========================================  ==========
form          target                                    objective
============  ========================================  ==========
gap_plus      (Delta_{n-1}^+)^2 - s Delta_{n-1}^+          max s
gap_full      Delta_n - s I                              max s
ht_full       s Delta_n - eta_{k_n} + eps I              min s
ht_plus       s (Delta_{n-1}^+)^2 - box_{n-1} + eps Delta^+   min s
============  ========================================  ==========

A certificate is a rational PSD matrix Q on a basis of (column, group
element) pairs with target = B^* Q B. Status ``Exact`` means the residual is
identically zero and Q passed an exact LDL^T check; anything else is
``ApproxWithResidual`` and is reported as numerical evidence only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .complex import MatricialComplex, box, eta, laplacian
from .errors import (DegreeOutOfRange, MalformedCertificate, RadiusTooSmall, SolverDiverged)
from .group import GroupRingElement, ball
from .linalg import Echelon, ldl_psd, nullspace
from .matrix import GRMatrix, SOSDecomposition, mat_mul, sos_expand
from .oracle import psd_screen

FORMS = ("gap_plus", "gap_full", "ht_full", "ht_plus")
MAXIMIZE = {"gap_plus": True, "gap_full": True, "ht_full": False, "ht_plus": False}


@dataclass(frozen=True)
class CertProblem:
    complex: MatricialComplex
    degree: int
    form: str = "gap_plus"
    epsilon: Fraction | None = None
    radius: int | str | None = None  # None: smallest radius that represents the target
    fixed_scalar: Fraction | None = None

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown form {self.form!r}; choose from {FORMS}")
        n, N = self.degree, self.complex.length
        lo = 1 if self.form in ("gap_plus", "ht_plus") else 0
        if not lo <= n <= N:
            raise DegreeOutOfRange(f"{self.form} needs degree in {lo}..{N}, got {n}")
        if self.form.startswith("ht"):
            eps = Fraction(self.epsilon if self.epsilon is not None else Fraction(1, 4))
            object.__setattr__(self, "epsilon", eps)
        elif self.epsilon is not None:
            object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.fixed_scalar is not None:
            object.__setattr__(self, "fixed_scalar", Fraction(self.fixed_scalar))

    @property
    def scalar_name(self) -> str:
        return "lambda" if self.form.startswith("gap") else "R"

    @property
    def maximize(self) -> bool:
        return MAXIMIZE[self.form]

    @property
    def size(self) -> int:
        C = self.complex
        return C.dim(self.degree - 1) if self.form in ("gap_plus", "ht_plus") else C.dim(self.degree)

    def parts(self) -> tuple[GRMatrix, GRMatrix]:
        """(T0, T1) with target = T0 + s T1."""
        C, n = self.complex, self.degree
        if self.form == "gap_plus":
            A = laplacian(C, n - 1, "plus")
            return mat_mul(A, A), -A
        if self.form == "gap_full":
            return laplacian(C, n, "full"), -GRMatrix.identity(C.group, C.dim(n))
        eps = self.epsilon
        if self.form == "ht_full":
            k = C.dim(n)
            return (GRMatrix.identity(C.group, k).scale(eps) - eta(C, k),
                    laplacian(C, n, "full"))
        A = laplacian(C, n - 1, "plus")
        return A.scale(eps) - box(C, n - 1), mat_mul(A, A)

    def target(self, s) -> GRMatrix:
        T0, T1 = self.parts()
        return T0 + T1.scale(Fraction(s))

    def resolved_radius(self) -> int:
        g = self.complex.group
        if self.radius == "full" or (self.radius is None and g.is_finite):
            if not g.is_finite:
                raise ValueError("radius 'full' needs a finite group")
            return g.diameter
        if self.radius is None:
            T0, T1 = self.parts()
            return max(1, math.ceil(max(T0.support_radius(), T1.support_radius()) / 2))
        return int(self.radius)

    def to_json(self):
        return {"complex": self.complex.to_json(), "degree": self.degree, "form": self.form,
                "epsilon": None if self.epsilon is None else str(self.epsilon),
                "radius": self.resolved_radius(),
                "fixed_scalar": None if self.fixed_scalar is None else str(self.fixed_scalar)}

    @classmethod
    def from_json(cls, d):
        C = MatricialComplex.from_json(d["complex"])
        return cls(C, d["degree"], d["form"],
                   Fraction(d["epsilon"]) if d.get("epsilon") is not None else None,
                   d.get("radius"),
                   Fraction(d["fixed_scalar"]) if d.get("fixed_scalar") is not None else None)


@dataclass
class SDPConfig:
    solver: str = "CLARABEL"
    tol: float = 1e-8
    max_denominator: int = 10**6
    backoff: float = 0.01
    verbose: bool = False


# ---- Gram system ------------------------------------------------------------------------

@dataclass
class GramSystem:
    problem: CertProblem
    basis: list          # [(j, key)]
    labels: list         # canonical (j, j', key) per constraint row
    rows: list           # list of [(a, b)] basis pairs contributing to the row
    b0: list             # Fraction, T0 coefficient per row
    b1: list             # Fraction, T1 coefficient per row
    n_coefficients: int  # coefficient equations before symmetry reduction

    @property
    def size(self) -> int:
        return len(self.basis)

    def rhs(self, s) -> list[Fraction]:
        s = Fraction(s)
        return [x + s * y for x, y in zip(self.b0, self.b1)]

    def sparse_matrix(self):
        from scipy.sparse import csr_matrix
        nb = self.size
        data, ri, ci = [], [], []
        for r, pairs in enumerate(self.rows):
            for a, b in pairs:
                data.append(1.0)
                ri.append(r)
                ci.append(a + b * nb)
        return csr_matrix((data, (ri, ci)), shape=(len(self.rows), nb * nb))

    def expand(self, Q) -> GRMatrix:
        """B^* Q B as a k x k matrix over R[G], computed exactly."""
        g = self.problem.complex.group
        acc = {}
        for a, (j, x) in enumerate(self.basis):
            xi = g.inv(x)
            for b, (jj, y) in enumerate(self.basis):
                q = Q[a][b]
                if q:
                    key = g.mul(xi, y)
                    d = acc.setdefault((j, jj), {})
                    d[key] = d.get(key, 0) + Fraction(q)
        k = self.problem.size
        return GRMatrix(g, k, k, {ij: GroupRingElement(g, c) for ij, c in acc.items()})


def build_gram_system(p: CertProblem) -> GramSystem:
    g = p.complex.group
    r = p.resolved_radius()
    keys = ball(g, r)
    k = p.size
    basis = [(j, x) for j in range(k) for x in keys]

    def canon(lab):
        j, jj, key = lab
        mate = (jj, j, g.inv(key))
        return min(lab, mate, key=lambda t: (t[0], t[1], g.sort_key(t[2])))

    rows: dict = {}
    reachable = set()
    for a, (j, x) in enumerate(basis):
        xi = g.inv(x)
        for b, (jj, y) in enumerate(basis):
            lab = (j, jj, g.mul(xi, y))
            reachable.add(lab)
            if canon(lab) == lab:
                rows.setdefault(lab, []).append((a, b))
    T0, T1 = p.parts()
    for T in (T0, T1):
        for (i, j), el in T.entries.items():
            for key in el.coeffs:
                if (i, j, key) not in reachable:
                    raise RadiusTooSmall(
                        f"target coefficient at ({i},{j},{g.word(key)}) needs a larger basis "
                        f"radius than {r}")
    labels = sorted(rows, key=lambda t: (t[0], t[1], g.sort_key(t[2])))
    return GramSystem(p, basis, labels, [rows[lab] for lab in labels],
                      [T0[lab[0], lab[1]][lab[2]] for lab in labels],
                      [T1[lab[0], lab[1]][lab[2]] for lab in labels],
                      len(reachable))


# ---- solving ----------------------------------------------------------------------------

@dataclass
class SolverReport:
    status: str
    objective: float | None
    solver: str
    margin: float | None = None

    def to_json(self):
        return {"status": self.status, "objective": self.objective, "solver": self.solver,
                "margin": self.margin}


def _solve(prob, cfg: SDPConfig):
    import cvxpy as cp
    opts = {}
    if cfg.solver == "CLARABEL":
        opts = dict(tol_gap_abs=cfg.tol, tol_gap_rel=cfg.tol, tol_feas=cfg.tol)
    try:
        prob.solve(solver=cfg.solver, verbose=cfg.verbose, **opts)
        used = cfg.solver
    except cp.error.SolverError:
        prob.solve(solver="CVXOPT", verbose=cfg.verbose)
        used = "CVXOPT"
    return used


def sdp_solve(sys: GramSystem, cfg: SDPConfig | None = None, fixed=None):
    """Optimize the objective scalar subject to the Gram constraints and Q PSD.

    With ``fixed`` (or a problem-level fixed scalar) this is a feasibility
    problem. Returns (Q, objective, report).
    """
    import cvxpy as cp
    cfg = cfg or SDPConfig()
    p = sys.problem
    nb = sys.size
    A = sys.sparse_matrix()
    b0 = np.array([float(x) for x in sys.b0])
    b1 = np.array([float(x) for x in sys.b1])
    Q = cp.Variable((nb, nb), symmetric=True)
    if fixed is None:
        fixed = p.fixed_scalar
    if fixed is not None:
        s = float(fixed)
        cons = [Q >> 0, A @ cp.vec(Q, order="F") == b0 + s * b1]
        prob = cp.Problem(cp.Minimize(0), cons)
    else:
        s = cp.Variable()
        cons = [Q >> 0, A @ cp.vec(Q, order="F") == b0 + s * b1]
        prob = cp.Problem(cp.Maximize(s) if p.maximize else cp.Minimize(s), cons)
    used = _solve(prob, cfg)
    if prob.status not in ("optimal", "optimal_inaccurate") or Q.value is None:
        raise SolverDiverged(f"SDP status {prob.status}")
    obj = float(fixed) if not isinstance(s, cp.Variable) else float(s.value)
    return Q.value, obj, SolverReport(prob.status, obj, used)


def trivial_kernel_vectors(sys: GramSystem, s) -> list[list[Fraction]]:
    """Vectors P w forced into ker Q by the trivial representation.

    Evaluating target = B^* Q B at the trivial representation gives
    T(1) = P^T Q P with P[(j, g), j] = 1, so w in ker T(1) forces Q P w = 0.
    """
    T = sys.problem.target(s).augmentation()
    k = len(T)
    rows = [{j: T[i][j] for j in range(k) if T[i][j]} for i in range(k)]
    out = []
    for w in nullspace(rows, k):
        out.append([w.get(j, Fraction(0)) for j, _ in sys.basis])
    return out


def _margin_solve(sys, s, cfg, kernel):
    """Re-solve at fixed s maximizing the minimum eigenvalue on the complement of ``kernel``."""
    import cvxpy as cp
    nb = sys.size
    if kernel:
        rows = [{a: v for a, v in enumerate(w) if v} for w in kernel]
        comp = nullspace(rows, nb)
        N = np.array([[float(v.get(a, 0)) for v in comp] for a in range(nb)])
    else:
        N = np.eye(nb)
    m = N.shape[1]
    A = sys.sparse_matrix()
    rhs = np.array([float(x) for x in sys.rhs(s)])
    if m == 0:
        return np.zeros((nb, nb)), 0.0
    # orthonormalize the complement for conditioning; the face is the same
    Nq, _ = np.linalg.qr(N)
    Y = cp.Variable((m, m), symmetric=True)
    t = cp.Variable()
    Qexpr = Nq @ Y @ Nq.T
    cons = [Y - t * np.eye(m) >> 0, A @ cp.vec(Qexpr, order="F") == rhs, t <= 1]
    prob = cp.Problem(cp.Maximize(t), cons)
    _solve(prob, cfg)
    if prob.status not in ("optimal", "optimal_inaccurate") or Y.value is None:
        return None, None
    Qv = Nq @ Y.value @ Nq.T
    return (Qv + Qv.T) / 2, float(t.value)


# ---- exact layer ---------------------------------------------------------------------------

def _round_matrix(Qf, max_den) -> list[list[Fraction]]:
    """Round to the common grid (1/max_den) Z so exact LDL^T stays cheap."""
    nb = len(Qf)
    Q = [[Fraction(0)] * nb for _ in range(nb)]
    for a in range(nb):
        for b in range(a, nb):
            v = Fraction(round(float((Qf[a][b] + Qf[b][a]) / 2) * max_den), max_den)
            Q[a][b] = Q[b][a] = v
    return Q


def project_affine(sys: GramSystem, Q, s, kernel=()) -> list[list[Fraction]] | None:
    """Smallest exact symmetric correction putting Q on the affine constraint set.

    Constraints are the Gram equations at scalar ``s`` plus Q v = 0 for each
    ``v`` in ``kernel``. Returns None when the exact system is inconsistent.
    """
    nb = sys.size

    def var(a, b):
        return (a, b) if a <= b else (b, a)

    rows, rhs = [], []
    for pairs, t in zip(sys.rows, sys.rhs(s)):
        row = {}
        for a, b in pairs:
            u = var(a, b)
            row[u] = row.get(u, 0) + 1
        rows.append(row)
        rhs.append(t - sum(Q[a][b] for a, b in pairs))
    for w in kernel:
        nz = [(b, v) for b, v in enumerate(w) if v]
        for a in range(nb):
            row = {}
            for b, v in nz:
                u = var(a, b)
                row[u] = row.get(u, 0) + v
            row = {u: v for u, v in row.items() if v}
            if row:
                rows.append(row)
                rhs.append(-sum(Q[a][b] * v for b, v in nz))
    # (M M^T) y = r, delta = M^T y
    n = len(rows)
    ech = Echelon()
    for i in range(n):
        ri = rows[i]
        gram_row = {}
        for j in range(n):
            rj = rows[j]
            small, large = (ri, rj) if len(ri) <= len(rj) else (rj, ri)
            dot = sum((v * large[u] for u, v in small.items() if u in large), Fraction(0))
            if dot:
                gram_row[j] = dot
        if not ech.add(gram_row, rhs[i]):
            return None
    y = ech.back_substitute()
    out = [row[:] for row in Q]
    delta = {}
    for i, yi in y.items():
        for u, v in rows[i].items():
            delta[u] = delta.get(u, 0) + yi * v
    for (a, b), v in delta.items():
        if a == b:
            out[a][a] += v
        else:
            # the variable for an off-diagonal pair is shared by Q[a][b] and Q[b][a]
            out[a][b] += v
            out[b][a] += v
    return out


@dataclass
class Certificate:
    problem: CertProblem
    scalar: Fraction
    Q: list
    basis: list
    residual: GRMatrix
    residual_l1: Fraction
    status: str  # Exact | ApproxWithResidual
    psd: bool = False
    solver: SolverReport | None = None
    screen: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def epsilon(self):
        return self.problem.epsilon

    def terms(self) -> SOSDecomposition:
        """Weighted rows M_i with sum w_i M_i^* M_i = B^* Q B (needs PSD Q)."""
        res = ldl_psd(self.Q)
        if not res.psd:
            raise MalformedCertificate("Q is not positive semidefinite")
        g = self.problem.complex.group
        k = self.problem.size
        terms, weights = [], []
        for d, v in res.terms():
            ent = {}
            for a, (j, x) in enumerate(self.basis):
                if v[a]:
                    ent.setdefault(j, {})[x] = v[a]
            terms.append(GRMatrix(g, 1, k, {(0, j): GroupRingElement(g, c)
                                             for j, c in ent.items()}))
            weights.append(d)
        return SOSDecomposition(terms, k, weights)

    def to_json(self):
        g = self.problem.complex.group
        d = {"problem": self.problem.to_json(),
             self.problem.scalar_name: str(self.scalar),
             "basis": [{"j": j, "word": g.word(x)} for j, x in self.basis],
             "Q": [[str(v) for v in row] for row in self.Q],
             "residual": self.residual.to_json(),
             "residual_l1": str(self.residual_l1),
             "status": self.status,
             "psd": self.psd,
             "screen": self.screen,
             "notes": self.notes}
        if self.epsilon is not None:
            d["epsilon"] = str(self.epsilon)
        if self.solver is not None:
            d["solver"] = self.solver.to_json()
        return d

    @classmethod
    def from_json(cls, d):
        try:
            p = CertProblem.from_json(d["problem"])
            g = p.complex.group
            basis = [(b["j"], g.normalize(b["word"])) for b in d["basis"]]
            Q = [[Fraction(v) for v in row] for row in d["Q"]]
            scalar = Fraction(d[p.scalar_name])
            residual = GRMatrix.from_json(g, d["residual"])
            return cls(p, scalar, Q, basis, residual, Fraction(d["residual_l1"]), d["status"],
                       d.get("psd", False), None, d.get("screen", {}), d.get("notes", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedCertificate(f"bad certificate JSON: {exc}") from exc

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)


def load_certificate(path) -> Certificate:
    with open(path) as fh:
        return Certificate.from_json(json.load(fh))


def _finish(sys, Q, s, notes=()) -> Certificate:
    p = sys.problem
    residual = p.target(s) - sys.expand(Q)
    ldl = ldl_psd(Q)
    status = "Exact" if residual.is_zero() and ldl.psd else "ApproxWithResidual"
    return Certificate(p, Fraction(s), Q, list(sys.basis), residual, residual.l1(), status,
                       ldl.psd, notes=list(notes))


def round_certificate(sys: GramSystem, Q_float, scalar, max_denominator: int = 10**6) -> Certificate:
    """Round Q to rationals, compute the exact residual, and nudge Q if LDL^T fails."""
    Q = _round_matrix(np.asarray(Q_float, dtype=float), max_denominator)
    ldl = ldl_psd(Q)
    notes = []
    if not ldl.psd:
        delta = 2 * abs(ldl.min_pivot) if ldl.min_pivot else Fraction(1, max_denominator)
        for a in range(len(Q)):
            Q[a][a] += delta
        notes.append(f"nudged by {delta} I after LDL^T failure")
    return _finish(sys, Q, Fraction(scalar), notes)


def hand_gram(sys: GramSystem, vectors, weights=None) -> list[list[Fraction]]:
    """Q = sum w v v^T for coefficient vectors given as {(j, key): value} dicts."""
    index = {b: a for a, b in enumerate(sys.basis)}
    nb = sys.size
    Q = [[Fraction(0)] * nb for _ in range(nb)]
    for t, vec in enumerate(vectors):
        w = Fraction(1) if weights is None else Fraction(weights[t])
        items = [(index[b], Fraction(v)) for b, v in vec.items()]
        for a, x in items:
            for b, y in items:
                Q[a][b] += w * x * y
    return Q


# ---- verification -----------------------------------------------------------------------

@dataclass
class VerifyReport:
    status: str
    residual: GRMatrix
    residual_l1: Fraction
    psd: bool
    matches_stored: bool
    first_difference: tuple | None = None

    def to_json(self):
        return {"status": self.status, "residual_l1": str(self.residual_l1), "psd": self.psd,
                "matches_stored_residual": self.matches_stored,
                "first_difference": None if self.first_difference is None else
                [str(x) for x in self.first_difference]}


def verify_certificate(cert: Certificate, p: CertProblem | None = None) -> VerifyReport:
    """Rebuild the target from the complex and expand the certificate through LDL^T terms."""
    p = p or cert.problem
    k = p.size
    nb = len(cert.basis)
    if len(cert.Q) != nb or any(len(row) != nb for row in cert.Q):
        raise MalformedCertificate("Q does not match the basis size")
    if any(j >= k for j, _ in cert.basis) or cert.residual.shape != (k, k):
        raise MalformedCertificate(
            f"certificate is for {cert.residual.rows}x{cert.residual.cols} matrices, the "
            f"problem needs {k}x{k}; wrong degree or form?")
    for a in range(nb):
        for b in range(a):
            if cert.Q[a][b] != cert.Q[b][a]:
                raise MalformedCertificate("Q is not symmetric")
    g = p.complex.group
    target = p.target(cert.scalar)
    ldl = ldl_psd(cert.Q)
    if ldl.psd:
        recon = sos_expand(_terms_from_ldl(ldl, cert.basis, g, k), g)
    else:
        # not a sum of squares; expand the bilinear form directly for the residual
        recon = GRMatrix.zeros(g, k)
        for a, (j, x) in enumerate(cert.basis):
            for b, (jj, y) in enumerate(cert.basis):
                q = cert.Q[a][b]
                if q:
                    recon = recon + GRMatrix(g, k, k, {(j, jj): GroupRingElement(
                        g, {g.mul(g.inv(x), y): q})})
    residual = target - recon
    status = "Exact" if residual.is_zero() and ldl.psd else "ApproxWithResidual"
    same = cert.residual.shape == residual.shape and cert.residual == residual
    return VerifyReport(status, residual, residual.l1(), ldl.psd, same, residual.first_nonzero())


def _terms_from_ldl(ldl, basis, g, k) -> SOSDecomposition:
    terms, weights = [], []
    for d, v in ldl.terms():
        ent = {}
        for a, (j, x) in enumerate(basis):
            if v[a]:
                ent.setdefault(j, {})[x] = v[a]
        terms.append(GRMatrix(g, 1, k, {(0, j): GroupRingElement(g, c) for j, c in ent.items()}))
        weights.append(d)
    return SOSDecomposition(terms, k, weights)


# ---- pipeline --------------------------------------------------------------------------------

def _backed_off(p: CertProblem, obj: float, cfg: SDPConfig) -> Fraction:
    step = cfg.backoff * abs(obj)
    val = obj - step if p.maximize else obj + step
    return Fraction(val).limit_denominator(cfg.max_denominator)


def certify(p: CertProblem, cfg: SDPConfig | None = None) -> Certificate:
    """build -> solve -> back off -> margin re-solve -> round -> project -> exact check."""
    cfg = cfg or SDPConfig()
    sys = build_gram_system(p)
    Qf, obj, report = sdp_solve(sys, cfg)
    s = p.fixed_scalar if p.fixed_scalar is not None else _backed_off(p, obj, cfg)
    kernel = trivial_kernel_vectors(sys, s)
    Qm, margin = _margin_solve(sys, s, cfg, kernel)
    report.margin = margin
    cert = None
    if Qm is not None:
        Q0 = _round_matrix(Qm, cfg.max_denominator)
        Qp = project_affine(sys, Q0, s, kernel)
        if Qp is not None:
            cand = _finish(sys, Qp, s, [f"exact projection onto affine constraints, "
                                        f"{len(kernel)} trivial-representation kernel vectors"])
            if cand.status == "Exact":
                cert = cand
    if cert is None:
        cert = round_certificate(sys, Qm if Qm is not None else Qf, s, cfg.max_denominator)
    cert.solver = report
    ok, worst = psd_screen(p.target(cert.scalar))
    cert.screen = {"passed": ok, "min_eigenvalue": worst}
    check = verify_certificate(cert)
    if check.status != cert.status or not check.matches_stored:
        raise AssertionError("independent verification disagrees with the pipeline")
    return cert


def objective_only(p: CertProblem, cfg: SDPConfig | None = None) -> float:
    return sdp_solve(build_gram_system(p), cfg)[1]
