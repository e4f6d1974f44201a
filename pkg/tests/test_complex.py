import pytest

from gapcert.complex import (D_apply, MatricialComplex, box, check_complex, delta0, eta,
                             fox_derivative, from_koszul, from_presentation, laplacian,
                             load_complex)
from gapcert.errors import DegreeOutOfRange, DimMismatch, NormalFormUnavailable
from gapcert.group import GroupDescriptor, cyclic, free_abelian, free_group, parse_element
from gapcert.matrix import GRMatrix, SOSDecomposition, mat_mul, sos_expand
from gapcert.sampling import random_sos
import random


def m(g, rows):
    return GRMatrix.from_rows(g, rows)


def test_z2_presentation_complex(z2, Z2):
    assert Z2.dims == (1, 2, 1)
    assert Z2.diff(0) == m(z2, [["1 - s"], ["1 - t"]])
    assert Z2.diff(1) == m(z2, [["1 - t", "s - 1"]])
    assert check_complex(Z2).valid


def test_small_presentations(z1, f2):
    F = from_presentation(f2)
    assert F.dims == (1, 2) and F.diff(0) == m(f2, [["1 - s"], ["1 - t"]])
    Z = from_presentation(z1)
    assert Z.diff(0) == m(z1, [["1 - s"]])
    with pytest.raises(NormalFormUnavailable):
        from_presentation(GroupDescriptor(("a",), ("a^3",), "free"))


def test_fox_rules(z2, f2):
    assert fox_derivative("s t s^-1 t^-1", "s", z2) == parse_element(z2, "1 - t")
    assert fox_derivative("s", "s", f2) == parse_element(f2, "1")
    assert fox_derivative("s^-1", "s", f2) == parse_element(f2, "-s^-1")
    assert fox_derivative("t^3", "s", f2).is_zero()


def test_c4_fox_gives_norm_element(c4, C4):
    assert C4.diff(1) == m(c4, [["1 + s + s^2 + s^3"]])
    full = laplacian(C4, 1, "full")
    assert full == m(c4, [["2 - s - s^3"]]) + m(c4, [["1 + s + s^2 + s^3"]]).scale(4)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_koszul_is_a_complex(d):
    K = from_koszul(d)
    assert check_complex(K).valid
    from math import comb
    assert K.dims == tuple(comb(d, n) for n in range(d + 1))


def test_koszul2_matches_presentation_up_to_sign(Z2):
    K = from_koszul(2, Z2.group)
    assert K.diff(0) == Z2.diff(0)
    assert K.diff(1) == -Z2.diff(1)


def test_corrupted_complex_witness(z2, Z2):
    bad = MatricialComplex(z2, Z2.dims, (Z2.diff(0), m(z2, [["1 - t", "s + 1"]])))
    rep = check_complex(bad)
    assert not rep.valid
    n, w = rep.failures[0]
    assert n == 0 and w == m(z2, [["2 - 2 t"]])
    single = MatricialComplex(z2, (1, 2), (Z2.diff(0),))
    assert check_complex(single).valid


def test_laplacians(z2, Z2):
    assert laplacian(Z2, 0, "plus") == m(z2, [["4 - s - s^-1 - t - t^-1"]])
    assert laplacian(Z2, 0, "minus").is_zero()
    assert laplacian(Z2, 1, "minus")[0, 0] == parse_element(z2, "2 - s - s^-1")
    with pytest.raises(DegreeOutOfRange):
        laplacian(Z2, 3)
    for n in range(3):
        for kind in ("plus", "minus", "full"):
            L = laplacian(Z2, n, kind)
            assert L.is_hermitian()
        assert laplacian(Z2, n, "full") == laplacian(Z2, n, "plus") + laplacian(Z2, n, "minus")


def test_d0_columns_have_zero_augmentation(K3):
    assert all(x == 0 for row in K3.diff(0).augmentation() for x in row)


def test_D_apply(z2, Z2, K3):
    assert D_apply(Z2, 0, GRMatrix.identity(z2, 2)) == laplacian(Z2, 0, "plus")
    a = GRMatrix.diag(z2, [parse_element(z2, "2 - t - t^-1"), parse_element(z2, "s + s^-1 - 2")])
    assert D_apply(Z2, 0, a).is_zero()
    with pytest.raises(DimMismatch):
        D_apply(Z2, 0, GRMatrix.identity(z2, 1))
    b = sos_expand(random_sos(K3.group, 3, random.Random(5)))
    assert D_apply(K3, 0, D_apply(K3, 1, b)).is_zero()


def test_D_of_sos_is_sos_via_terms(K3):
    dec = random_sos(K3.group, 3, random.Random(11))
    lhs = D_apply(K3, 1, sos_expand(dec))
    pushed = SOSDecomposition([mat_mul(M, K3.diff(1)) for M in dec.terms], 3)
    assert lhs == sos_expand(pushed)


def test_eta_and_box(z2, Z2):
    D = delta0(Z2)
    assert eta(Z2, 2) == GRMatrix.diag(z2, [D, D])
    assert eta(Z2, 0).shape == (0, 0)
    assert box(Z2, 0) == m(z2, [[D * D]])


def test_json_roundtrip(Z2, K3, tmp_path):
    for C in (Z2, K3):
        path = tmp_path / "c.json"
        C.save(path)
        back = load_complex(path)
        assert back.dims == C.dims and all(a == b for a, b in zip(back.diffs, C.diffs))


def test_fixture_files(fixtures_dir):
    C = load_complex(fixtures_dir / "koszul3.json")
    assert C.dims == (1, 3, 3, 1)
