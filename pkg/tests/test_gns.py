from fractions import Fraction

import numpy as np
import pytest

from gapcert.complex import D_apply, laplacian
from gapcert.errors import (MalformedInput, NotACocycle, NotPositive, NotVanishingOnImage,
                            SupportExceeded)
from gapcert.gns import (PositiveFunctional, cocycle_from_functional, extend_functional,
                         factoring_check, functional_from_cocycle, gns_construct,
                         gram_of_functional, matrix_coefficients, reproduction_error,
                         sc_vanishing_check)
from gapcert.group import cyclic
from gapcert.matrix import GRMatrix
from gapcert.oracle import apply_rep, regular_rep, torus_rep


@pytest.fixture
def c2():
    return cyclic(2)


def test_table_must_be_hermitian(z1):
    s = z1.normalize("s")
    with pytest.raises(MalformedInput):
        PositiveFunctional(z1, 1, {(0, 0, s): 1}, 1)
    psi = PositiveFunctional(z1, 1, {(0, 0, s): 1, (0, 0, z1.inv(s)): 1}, 1)
    with pytest.raises(SupportExceeded):
        psi.value(0, 0, z1.normalize("s^2"))


def test_gram_examples(c2):
    e, g = c2.identity, c2.generator(0)
    delta = PositiveFunctional(c2, 1, {(0, 0, e): 1}, 1)
    assert np.allclose(gram_of_functional(delta, 1), np.eye(2))
    ones = PositiveFunctional(c2, 1, {(0, 0, e): 1, (0, 0, g): 1}, 1)
    G = gram_of_functional(ones, 1)
    assert np.allclose(G, np.ones((2, 2))) and np.linalg.matrix_rank(G) == 1
    assert not gram_of_functional(PositiveFunctional(c2, 1, {}, 1), 1).any()


def test_gns_examples(c2):
    e, g = c2.identity, c2.generator(0)
    model = gns_construct(PositiveFunctional(c2, 1, {(0, 0, e): 1}, 1), 1)
    assert model.dim == 2 and not model.approximate
    assert np.allclose(sorted(np.linalg.eigvalsh(model.rep.matrices["s"])), [-1, 1])
    assert model.pairing(0, 0, e) == pytest.approx(1) and model.pairing(0, 0, g) == pytest.approx(0)
    one = gns_construct(PositiveFunctional(c2, 1, {(0, 0, e): 1, (0, 0, g): 1}, 1), 1)
    assert one.dim == 1 and np.allclose(one.rep.matrices["s"], 1)
    assert np.allclose(np.abs(one.cyclic), 1)
    assert gns_construct(PositiveFunctional(c2, 1, {}, 1), 1).dim == 0


def test_gns_rejects_negative(c2):
    g = c2.generator(0)
    with pytest.raises(NotPositive):
        gns_construct(PositiveFunctional(c2, 1, {(0, 0, c2.identity): 1, (0, 0, g): 2}, 1), 1)


def test_gns_reproduces_matrix_coefficients(c4):
    rep = regular_rep(c4)
    rng = np.random.default_rng(3)
    psi = matrix_coefficients(rep, rng.normal(size=8), 2, 2)
    model = gns_construct(psi, 2)
    assert not model.approximate
    assert reproduction_error(psi, model, 2) <= 1e-8


def test_z2_cocycle_at_pi(Z2):
    rep = torus_rep(Z2.group, [np.pi, np.pi])
    psi = functional_from_cocycle(rep, [1, 1], Z2, 1, 2)
    assert psi(GRMatrix.identity(Z2.group, 2)) == 2
    assert psi(laplacian(Z2, 1, "plus")) == 0
    assert sc_vanishing_check(psi, Z2, 1).ok
    with pytest.raises(NotACocycle):
        functional_from_cocycle(rep, [1, 0], Z2, 1, 2)
    assert functional_from_cocycle(rep, [0, 0], Z2, 1, 2).is_zero()


def test_sc_violation_for_identity_pattern(Z2):
    e = Z2.group.identity
    psi = PositiveFunctional(Z2.group, 2, {(0, 0, e): 1, (1, 1, e): 1}, 2)
    rep = sc_vanishing_check(psi, Z2, 1)
    assert not rep.ok and any(v[4] != 0 for v in rep.violations)
    assert sc_vanishing_check(PositiveFunctional(Z2.group, 2, {}, 2), Z2, 1).ok


def test_cocycle_round_trip_finite(C4):
    rep = regular_rep(C4.group)
    # on C_4 every cocycle of the presentation complex in degree 1 is a coboundary
    c = np.array([1.0, 2.0, -1.0, 0.5])
    z = apply_rep(rep, C4.diff(0)) @ c
    psi = functional_from_cocycle(rep, z, C4, 1, 2)
    model, z2 = cocycle_from_functional(psi, C4, 1, 2)
    assert not model.approximate
    assert reproduction_error(psi, model, 2) <= 1e-7
    assert np.linalg.norm(apply_rep(model.rep, C4.diff(1)) @ z2) <= 1e-7 * max(1, np.linalg.norm(z2))


def test_cocycle_from_functional_rejects(Z2):
    e = Z2.group.identity
    psi = PositiveFunctional(Z2.group, 2, {(0, 0, e): 1, (1, 1, e): 1}, 2)
    with pytest.raises(NotVanishingOnImage) as info:
        cocycle_from_functional(psi, Z2, 1, 1)
    assert info.value.witness == laplacian(Z2, 1, "plus")
    model, z = cocycle_from_functional(PositiveFunctional(Z2.group, 2, {}, 2), Z2, 1, 1)
    assert model.dim == 0 and z.size == 0


def test_extension_of_coboundary(C4):
    rep = regular_rep(C4.group)
    c = np.array([1.0, 0.0, -1.0, 2.0])
    z = apply_rep(rep, C4.diff(0)) @ c
    psi = functional_from_cocycle(rep, z, C4, 1, 2)
    cand = matrix_coefficients(rep, c, 1, 2)
    rep1 = extend_functional(psi, C4, 1, 2, candidate=cand)
    assert rep1.verdict == "ExtensionFound" and rep1.method == "explicit"
    rep2 = extend_functional(psi, C4, 1, 2)
    assert rep2.verdict == "ExtensionFound"
    assert rep2.detail["restriction_error"] <= 1e-7
    zero = extend_functional(PositiveFunctional(C4.group, 1, {}, 2), C4, 1, 2)
    assert zero.verdict == "ExtensionFound" and zero.table.is_zero()


def test_extension_z2_is_self_consistent(Z2):
    rep = torus_rep(Z2.group, [np.pi, np.pi])
    psi = functional_from_cocycle(rep, [1, 1], Z2, 1, 4)
    out = extend_functional(psi, Z2, 1, 2)
    assert out.verdict in ("ExtensionFound", "InfeasibleAtRadius", "NumericallyInconclusive")
    if out.verdict == "ExtensionFound":
        g = Z2.group
        for key in [g.identity, g.normalize("s"), g.normalize("t^-1")]:
            img = D_apply(Z2, 0, GRMatrix.unit(g, 2, 2, 0, 1, key))
            assert abs(float(out.table(img)) - float(psi.value(0, 1, key))) <= 1e-6


def test_factoring_check(Z2):
    rep = torus_rep(Z2.group, [np.pi, np.pi])
    psi = functional_from_cocycle(rep, [1, 1], Z2, 1, 4)
    rep_ = factoring_check(psi, Z2, 1, 1)
    assert rep_["kernel_elements"] >= rep_["evaluated"]
