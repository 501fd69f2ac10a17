from collections import Counter
from dataclasses import replace
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from otw.bose_mesner import (
    SpectralError,
    build_distance_matrices,
    build_primitive_idempotents,
    check_spectral_identities,
    is_eigenvalue,
    validate_intersection_numbers,
)
from otw.linalg import RationalMatrix

from conftest import algebra


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_intersection_numbers_recount(m):
    assert validate_intersection_numbers(algebra(m).distance_matrices)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_distance_matrices_partition_J(m):
    dm = algebra(m).distance_matrices
    n = dm.ctx.vertex_count
    total = RationalMatrix.zeros(n)
    for a in dm.a:
        total = total + a
    assert total == RationalMatrix.ones(n)
    assert dm.sphere_sizes[1] == m + 1


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_eigenvalues_against_floating_point(m):
    alg = algebra(m)
    dense = np.array(alg.distance_matrices.adjacency.to_dense(), dtype=float)
    numeric = Counter(int(round(x)) for x in np.linalg.eigvalsh(dense))
    sd = alg.spectral
    exact = {sd.theta(k): sd.multiplicity(k) for k in range(m + 1)}
    assert exact == dict(numeric)


@pytest.mark.parametrize("m", range(1, 7))
def test_q_order_spectrum(m):
    sd = algebra(m).spectral
    assert sd.ordered_eigenvalues == tuple((-1) ** k * (m + 1 - k) for k in range(m + 1))
    mults = [sd.multiplicity(k) for k in range(m + 1)]
    assert mults == [comb(2 * m + 1, k) - (comb(2 * m + 1, k - 1) if k else 0) for k in range(m + 1)]


def test_frozen_multiplicities():
    assert [algebra(3).spectral.multiplicity(k) for k in range(4)] == [1, 6, 14, 14]
    assert [algebra(4).spectral.multiplicity(k) for k in range(5)] == [1, 8, 27, 48, 42]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_idempotent_identities(m):
    check_spectral_identities(algebra(m).spectral)


@pytest.mark.parametrize("m", [2, 3])
def test_materialized_idempotents(m):
    sd = algebra(m).spectral
    a1 = sd.dm.adjacency
    mats = [sd.projector_matrix(k) for k in range(m + 1)]
    n = sd.dm.ctx.vertex_count
    total = RationalMatrix.zeros(n)
    for k, e in enumerate(mats):
        assert e @ e == e
        assert a1 @ e == e.scale(sd.theta(k))
        total = total + e
    assert total == RationalMatrix.identity(n)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_krein_nonnegative_and_tridiagonal(m):
    sd = algebra(m).spectral
    for h in range(m + 1):
        for i in range(m + 1):
            q = sd.krein_q(h, 1, i)
            assert q >= 0
            if abs(h - i) > 1:
                assert q == 0
            elif abs(h - i) == 1:
                assert q > 0
            assert q == sd.krein_q(i, 1, h) * Fraction(sd.multiplicity(i), sd.multiplicity(h))


def test_q_ordering_uniqueness():
    assert len(algebra(2).spectral.all_q_orderings) == 2
    for m in (3, 4, 5):
        assert len(algebra(m).spectral.all_q_orderings) == 1


def test_eigenvalue_test_agrees_with_full_rank():
    dm = build_distance_matrices(algebra(3).ctx)
    for theta in range(-5, 6):
        assert is_eigenvalue(dm, theta, full_check=True) == (theta in (4, -3, 2, -1))


def test_missing_ordering_raises():
    sd = build_primitive_idempotents(algebra(3).distance_matrices)
    with pytest.raises(SpectralError):
        sd.theta(0)
    with pytest.raises(SpectralError):
        replace(sd, q_ordering=(0, 1, 2, 3)).krein_q(0, 0, 0)
