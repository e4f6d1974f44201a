from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from gapcert.linalg import Echelon, ldl_psd, nullspace, rank, solve


def to_rows(A):
    return [{j: Fraction(int(v)) for j, v in enumerate(r) if v} for r in A]


def test_solve_small_system():
    rows = [{0: 2, 1: 1}, {0: 1, 1: -1}]
    x = solve(rows, [5, 1])
    assert x == {0: 2, 1: 1}
    assert solve([{0: 1}, {0: 1}], [1, 2]) is None


def test_nullspace_and_rank():
    A = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
    basis = nullspace(to_rows(A), 3)
    assert len(basis) == 1 and rank(to_rows(A)) == 2
    v = np.array([float(basis[0].get(j, 0)) for j in range(3)])
    assert np.allclose(np.array(A) @ v, 0)


def test_echelon_free_values():
    ech = Echelon()
    ech.add({0: 1, 1: 1, 2: 1}, 3)
    x = ech.back_substitute({1: Fraction(1), 2: Fraction(1)})
    assert x[0] == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 10**6))
def test_solve_matches_numpy(m, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(-3, 4, size=(m, n))
    x0 = rng.integers(-3, 4, size=n)
    b = A @ x0
    x = solve(to_rows(A), [int(v) for v in b])
    assert x is not None
    xv = np.array([float(x.get(j, 0)) for j in range(n)])
    assert np.allclose(A @ xv, b)
    assert rank(to_rows(A)) == np.linalg.matrix_rank(A)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6), st.integers(0, 6), st.booleans(), st.integers(0, 10**6))
def test_ldl_decides_psd(n, r, shift, seed):
    rng = np.random.default_rng(seed)
    B = rng.integers(-3, 4, size=(n, r))
    Q = B @ B.T - (np.eye(n, dtype=int) if shift else 0)
    res = ldl_psd([[Fraction(int(v), 3) for v in row] for row in Q])
    ev = np.linalg.eigvalsh(Q.astype(float))
    assert res.psd == (ev.min() > -1e-9)
    if res.psd:
        R = sum(float(d) * np.outer([float(x) for x in v], [float(x) for x in v])
                for d, v in res.terms()) if any(res.D) else np.zeros((n, n))
        assert np.allclose(R, Q / 3)
    else:
        assert res.min_pivot < 0
