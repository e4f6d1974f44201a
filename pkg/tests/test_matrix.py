import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gapcert.errors import DimMismatch
from gapcert.group import free_abelian, free_group, parse_element, symmetric3
from gapcert.matrix import (GRMatrix, SOSDecomposition, frobenius_pairing, hstack, mat_mul,
                            sos_expand, vstack)
from gapcert.sampling import random_matrix, random_sos


def test_z2_differentials_compose_to_zero(z2):
    d0 = GRMatrix.from_rows(z2, [["1 - s"], ["1 - t"]])
    d1 = GRMatrix.from_rows(z2, [["1 - t", "s - 1"]])
    assert mat_mul(d1, d0).is_zero()
    assert mat_mul(d1, d0).shape == (1, 1)


def test_adjoint_of_d0(z2):
    d0 = GRMatrix.from_rows(z2, [["1 - s"], ["1 - t"]])
    assert d0.adjoint() == GRMatrix.from_rows(z2, [["1 - s^-1", "1 - t^-1"]])
    assert d0.adjoint().adjoint() == d0
    assert GRMatrix.zeros(z2, 2, 3).adjoint() == GRMatrix.zeros(z2, 3, 2)


def test_identity_is_neutral(z2):
    A = random_matrix(z2, 2, 3, 1, random.Random(1))
    assert mat_mul(GRMatrix.identity(z2, 2), A) == A
    assert mat_mul(A, GRMatrix.identity(z2, 3)) == A


def test_shape_errors(z2):
    with pytest.raises(DimMismatch):
        mat_mul(GRMatrix.zeros(z2, 2, 3), GRMatrix.zeros(z2, 2, 3))
    with pytest.raises(DimMismatch):
        GRMatrix.zeros(z2, 2) + GRMatrix.zeros(z2, 3)
    with pytest.raises(DimMismatch):
        SOSDecomposition([GRMatrix.zeros(z2, 1, 2)], 3)


def test_sos_expand_examples(z1, z2):
    dec = SOSDecomposition([GRMatrix.from_rows(z1, [["1 - s"]])], 1)
    assert sos_expand(dec) == GRMatrix.from_rows(z1, [["2 - s - s^-1"]])
    assert sos_expand(SOSDecomposition([], 2), z2) == GRMatrix.zeros(z2, 2)
    d0 = GRMatrix.from_rows(z2, [["1 - s"], ["1 - t"]])
    assert sos_expand(SOSDecomposition([d0], 1)) == GRMatrix.from_rows(
        z2, [["4 - s - s^-1 - t - t^-1"]])


def test_weighted_sos(z1):
    M = GRMatrix.from_rows(z1, [["1 - s"]])
    dec = SOSDecomposition([M], 1, [Fraction(3, 2)])
    assert sos_expand(dec) == sos_expand(SOSDecomposition([M], 1)).scale(Fraction(3, 2))


def test_frobenius_examples(z1):
    a = GRMatrix.from_rows(z1, [["2 - s - s^-1"]])
    assert frobenius_pairing(a, GRMatrix.identity(z1, 1)) == 2
    assert frobenius_pairing(GRMatrix.zeros(z1, 1), GRMatrix.identity(z1, 1)) == 0


def test_stacking(z2):
    A = GRMatrix.from_rows(z2, [["s", "t"]])
    B = GRMatrix.from_rows(z2, [["1", "0"]])
    assert vstack([A, B]) == GRMatrix.from_rows(z2, [["s", "t"], ["1", "0"]])
    assert hstack([A.adjoint(), B.adjoint()]) == vstack([A, B]).adjoint()


def test_json_roundtrip(z2):
    A = random_matrix(z2, 2, 2, 2, random.Random(3))
    assert GRMatrix.from_json(z2, A.to_json()) == A


GROUPS = [free_abelian(2), free_group(2), symmetric3()]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(GROUPS), st.integers(0, 10**6))
def test_matrix_algebra_properties(g, seed):
    rng = random.Random(seed)
    A = random_matrix(g, 2, 2, 1, rng)
    B = random_matrix(g, 2, 2, 1, rng)
    C = random_matrix(g, 2, 2, 1, rng)
    assert mat_mul(mat_mul(A, B), C) == mat_mul(A, mat_mul(B, C))
    assert mat_mul(A, B + C) == mat_mul(A, B) + mat_mul(A, C)
    assert mat_mul(A, B).adjoint() == mat_mul(B.adjoint(), A.adjoint())


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(GROUPS), st.integers(1, 3), st.integers(0, 10**6))
def test_sos_detector(g, k, seed):
    dec = random_sos(g, k, random.Random(seed))
    S = sos_expand(dec)
    assert S.is_hermitian()
    total = sum((M.l2sq() for M in dec.terms), Fraction(0))
    assert frobenius_pairing(S, GRMatrix.identity(g, k)) == total
    assert S.is_zero() == all(M.is_zero() for M in dec.terms)
