"""Finite-dimensional representations used as brute-force numerical oracles."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .complex import MatricialComplex, eta, laplacian
from .errors import NotFinite, NotHermitian, UnassignedGenerator
from .group import GroupDescriptor, GroupRingElement
from .matrix import GRMatrix

HERMITIAN_TOL = 1e-10
KERNEL_TOL = 1e-8
INVARIANT_TOL = 1e-10


@dataclass
class FiniteDimRep:
    """Generator symbol -> orthogonal / unitary matrix of size ``dim``."""

    group: GroupDescriptor
    dim: int
    matrices: dict[str, np.ndarray]
    flavor: str = "real"
    tol: float = 1e-12
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        dtype = float if self.flavor == "real" else complex
        self.matrices = {k: np.asarray(v, dtype=dtype) for k, v in self.matrices.items()}
        for k, M in self.matrices.items():
            if M.shape != (self.dim, self.dim):
                raise ValueError(f"matrix for {k} has shape {M.shape}")
            if not np.allclose(M.conj().T @ M, np.eye(self.dim), atol=self.tol):
                raise ValueError(f"matrix for {k} is not orthogonal/unitary")
        if set(self.matrices) >= set(self.group.generators):
            for r in self.group.relators:
                if not np.allclose(self.word_matrix(self.group.letters_of_word(r)),
                                   np.eye(self.dim), atol=max(self.tol, 1e-10)):
                    raise ValueError(f"relator {r!r} does not map to the identity")

    @property
    def dtype(self):
        return float if self.flavor == "real" else complex

    def gen(self, i: int, sign: int) -> np.ndarray:
        name = self.group.generators[i]
        if name not in self.matrices:
            raise UnassignedGenerator(f"generator {name!r} has no matrix")
        M = self.matrices[name]
        return M if sign > 0 else M.conj().T

    def word_matrix(self, letters) -> np.ndarray:
        out = np.eye(self.dim, dtype=self.dtype)
        for i, e in letters:
            step = self.gen(i, 1 if e > 0 else -1)
            for _ in range(abs(e)):
                out = out @ step
        return out

    def element(self, key) -> np.ndarray:
        M = self._cache.get(key)
        if M is None:
            M = self.word_matrix(self.group.word_letters(key))
            self._cache[key] = M
        return M

    def to_json(self):
        def enc(M):
            if self.flavor == "real":
                return M.tolist()
            return [[[z.real, z.imag] for z in row] for row in M]
        return {"dim": self.dim, "flavor": self.flavor,
                "matrices": {k: enc(v) for k, v in self.matrices.items()}}

    @classmethod
    def from_json(cls, group, d):
        flavor = d.get("flavor", "real")
        mats = {}
        for k, v in d["matrices"].items():
            arr = np.array(v, dtype=float)
            mats[k] = arr if flavor == "real" else arr[..., 0] + 1j * arr[..., 1]
        return cls(group, d["dim"], mats, flavor)


def regular_rep(g: GroupDescriptor) -> FiniteDimRep:
    """Left multiplication permutation matrices on the finite group."""
    if not g.is_finite:
        raise NotFinite(f"{g!r} is not a finite table group")
    n = g.order
    mats = {}
    for i, name in enumerate(g.generators):
        s = g.generator(i)
        P = np.zeros((n, n))
        for h in range(n):
            P[g.mul(s, h), h] = 1.0
        mats[name] = P
    return FiniteDimRep(g, n, mats, "real")


def torus_rep(g: GroupDescriptor, theta, flavor: str = "real") -> FiniteDimRep:
    """Character s_i -> e^{i theta_i} of Z^d.

    The real flavor realizes each character by the 2x2 rotation by theta_i,
    except when every angle is 0 or pi, where the character is already real
    and the 1x1 matrices +-1 are used (so the trivial representation has
    dimension one).
    """
    theta = [float(t) for t in theta]
    if len(theta) != g.rank:
        raise ValueError(f"need {g.rank} angles, got {len(theta)}")
    if flavor == "complex":
        return FiniteDimRep(g, 1, {n: [[np.exp(1j * t)]] for n, t in zip(g.generators, theta)},
                            "complex")
    if all(np.isclose(np.cos(t) ** 2, 1.0, atol=1e-15) for t in theta):
        return FiniteDimRep(g, 1, {n: [[round(np.cos(t))]] for n, t in zip(g.generators, theta)})
    mats = {n: [[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]]
            for n, t in zip(g.generators, theta)}
    return FiniteDimRep(g, 2, mats)


def apply_element(rep: FiniteDimRep, a: GroupRingElement) -> np.ndarray:
    out = np.zeros((rep.dim, rep.dim), dtype=rep.dtype)
    for k, v in a.coeffs.items():
        out += float(v) * rep.element(k)
    return out


def apply_rep(rep: FiniteDimRep, A: GRMatrix) -> np.ndarray:
    d = rep.dim
    out = np.zeros((A.rows * d, A.cols * d), dtype=rep.dtype)
    for (i, j), v in A.entries.items():
        out[i * d:(i + 1) * d, j * d:(j + 1) * d] = apply_element(rep, v)
    return out


def hermitian_eigenvalues(M: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    if M.size and np.max(np.abs(M - M.conj().T)) > tol:
        raise NotHermitian("matrix is not hermitian to tolerance")
    if not M.size:
        return np.zeros(0)
    return np.linalg.eigvalsh((M + M.conj().T) / 2)


def spectral_gap(rep: FiniteDimRep, A: GRMatrix, kernel_tol: float = KERNEL_TOL):
    """(smallest eigenvalue above kernel_tol or None, kernel dimension)."""
    ev = hermitian_eigenvalues(apply_rep(rep, A))
    kernel = int(np.sum(np.abs(ev) <= kernel_tol))
    above = ev[ev > kernel_tol]
    return (float(above.min()) if above.size else None), kernel


def harmonic_dim(rep: FiniteDimRep, C: MatricialComplex, n: int,
                 kernel_tol: float = KERNEL_TOL) -> int:
    """Dimension of ker pi(Delta_n), i.e. of reduced cohomology in degree n."""
    return spectral_gap(rep, laplacian(C, n, "full"), kernel_tol)[1]


def invariant_check(rep: FiniteDimRep, c, k: int, C: MatricialComplex | None = None,
                    tol: float = INVARIANT_TOL) -> bool:
    """True iff <pi(eta_k) c, c> <= tol * |c|^2, i.e. c is invariant blockwise.

    ``eta_k`` needs a complex to define Delta_0; by default the presentation
    complex of the representation's group is used.
    """
    if C is None:
        from .complex import from_presentation
        C = from_presentation(rep.group)
    c = np.asarray(c, dtype=rep.dtype).reshape(-1)
    if c.size != k * rep.dim:
        raise ValueError(f"vector has length {c.size}, expected {k * rep.dim}")
    if k == 0:
        return True
    E = apply_rep(rep, eta(C, k))
    val = np.real(np.vdot(c, E @ c))
    return bool(val <= tol * np.real(np.vdot(c, c)))


def fixed_by_generators(rep: FiniteDimRep, c, k: int, tol: float = 1e-8) -> bool:
    """Direct check that each block of c is fixed by every generator matrix."""
    c = np.asarray(c, dtype=rep.dtype).reshape(k, rep.dim)
    for i in range(rep.group.rank):
        M = rep.gen(i, 1)
        if np.max(np.abs(c @ M.T - c), initial=0.0) > tol * max(1.0, np.abs(c).max(initial=0)):
            return False
    return True


def random_torus_points(d: int, count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(0, 2 * np.pi, size=(count, d))


def psd_screen(A: GRMatrix, points: int = 100, seed: int = 0, tol: float = 1e-9):
    """Necessary condition for A in Sigma^2: pi(A) PSD in cheap representations.

    Finite groups use the regular representation, Z^d uses random torus
    points. Returns (passed, most negative eigenvalue seen).
    """
    g = A.group
    if g.is_finite:
        reps = [regular_rep(g)]
    elif g.normal_form == "abelian":
        reps = [torus_rep(g, th) for th in random_torus_points(g.rank, points, seed)]
    else:
        return True, None
    worst = np.inf
    for r in reps:
        ev = hermitian_eigenvalues(apply_rep(r, A), tol=1e-8)
        if ev.size:
            worst = min(worst, float(ev.min()))
    return bool(worst >= -tol), (None if worst == np.inf else worst)


def load_rep(group, path) -> FiniteDimRep:
    with open(path) as fh:
        return FiniteDimRep.from_json(group, json.load(fh))
