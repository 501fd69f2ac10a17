from math import factorial

import pytest

from otw.checks import (
    VerificationError,
    adjacency_types,
    brute_force_full_orbits,
    brute_force_stabilizer_orbits,
    flat_type,
    generated_dimension,
    path_product_identity,
    stabilizer_elements,
    verify_almost_bipartite,
    verify_centralizer,
    verify_dimensions,
    verify_generation,
    verify_generator_identities,
    verify_path_products,
)
from otw.linalg import RationalMatrix

from conftest import algebra


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_generator_identities(m):
    alg = algebra(m)
    rep = verify_generator_identities(alg.orbit_basis, alg.dual, alg.distance_matrices)
    assert len(rep.items) == 3 * m + 3


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_flat_term_counted_once(m):
    # Letting the adjacency sum run through i = m adds the flat orbit matrix
    # twice more, so the sum must stop at m - 1.
    alg = algebra(m)
    ob = alg.orbit_basis
    total = RationalMatrix.zeros(ob.ctx.vertex_count)
    for tt in adjacency_types(m):
        total = total + ob.element(tt)
    assert total == alg.distance_matrices.adjacency
    assert flat_type(m) in adjacency_types(m)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_almost_bipartite(m):
    alg = algebra(m)
    verify_almost_bipartite(alg.dual, alg.distance_matrices)


def test_stabilizer_size_m2():
    assert len(list(stabilizer_elements(2))) == 12


def test_brute_force_orbits_m2():
    ob = algebra(2).orbit_basis
    assert brute_force_stabilizer_orbits(ob)


def test_brute_force_full_orbits_m1():
    assert brute_force_full_orbits(algebra(1).ctx)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_centralizer(m):
    rep = verify_centralizer(algebra(m).orbit_basis)
    assert rep.passed


def test_centralizer_detects_non_commuting_matrix():
    ob = algebra(2).orbit_basis
    rep = verify_centralizer(ob, strict=False)
    assert rep.passed
    # A single off-orbit entry is not invariant.
    n = ob.ctx.vertex_count
    bad = RationalMatrix(n, n, [(1, 2, 1)])
    from otw.checks import permutation_matrix, stabilizer_generators, vertex_permutation
    perms = [permutation_matrix(vertex_permutation(ob.ctx, s)) for _, s in stabilizer_generators(2)]
    assert any(p @ bad != bad @ p for p in perms)


@pytest.mark.parametrize("m,dim", [(1, 5), (2, 15), (3, 35), (4, 70)])
def test_generated_dimension(m, dim):
    alg = algebra(m)
    assert generated_dimension(alg.orbit_basis, alg.structure_constants) == dim
    assert verify_generation(alg.orbit_basis, alg.structure_constants).passed


def test_dimension_report():
    rep = verify_dimensions(algebra(3).types, 3)
    assert rep.summary == {"dimension": 35, "expected": 35}
    with pytest.raises(VerificationError):
        verify_dimensions(algebra(3).types, 4)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_path_products(m):
    alg = algebra(m)
    rep = verify_path_products(alg.orbit_basis, alg.dual, alg.distance_matrices)
    assert len(rep.items) == m * (m + 1) // 2


def test_path_product_scalars():
    # Odd k: ((k-1)/2)!^2 (k+1)/2; even k: (k/2)!^2.
    assert [path_product_identity(0, k, 5)[1] for k in range(1, 6)] == [1, 1, 2, 4, 12]
    for k in range(1, 9):
        h = k // 2
        expect = factorial(h) ** 2 if k % 2 == 0 else factorial(h) ** 2 * (h + 1)
        assert path_product_identity(1, k, 8)[1] == expect
