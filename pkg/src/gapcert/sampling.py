"""Seeded random group ring elements, matrices and SOS decompositions for experiments."""

from __future__ import annotations

import random
from fractions import Fraction

from .group import GroupDescriptor, GroupRingElement, ball
from .matrix import GRMatrix, SOSDecomposition


def random_element(g: GroupDescriptor, radius: int, rng: random.Random, density=0.5,
                   coeff_range=3, denominators=(1, 1, 2)) -> GroupRingElement:
    out = {}
    for key in ball(g, radius):
        if rng.random() < density:
            c = Fraction(rng.randint(-coeff_range, coeff_range), rng.choice(denominators))
            if c:
                out[key] = c
    return GroupRingElement(g, out)


def random_matrix(g, rows, cols, radius, rng, density=0.5, zero_entry_prob=0.3) -> GRMatrix:
    ent = {}
    for i in range(rows):
        for j in range(cols):
            if rng.random() >= zero_entry_prob:
                ent[(i, j)] = random_element(g, radius, rng, density)
    return GRMatrix(g, rows, cols, ent)


def random_sos(g, k, rng, max_terms=3, radius=1, zero_prob=0.15) -> SOSDecomposition:
    """Random decomposition; with probability ``zero_prob`` every term is zero."""
    n = rng.randint(1, max_terms)
    if rng.random() < zero_prob:
        terms = [GRMatrix.zeros(g, rng.randint(1, 2), k) for _ in range(n)]
    else:
        terms = [random_matrix(g, rng.randint(1, 2), k, radius, rng) for _ in range(n)]
    return SOSDecomposition(terms, k)
