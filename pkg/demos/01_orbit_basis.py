"""
The orbit basis of O_4
======================

Vertices of the Odd graph O_(m+1) are the m-subsets of {1, ..., 2m+1};
two are adjacent when disjoint.  Fixing x0 = {1, ..., m}, every pair (x, y)
gets a type (i, j, t, p) = (|x & x0|, |y & x0|, |x & y|, |x & y & x0|), and
the 0/1 matrices of the types form a basis of the centralizer algebra.
"""
from math import comb

import numpy as np

from otw.algebra import OddGraphAlgebra
from otw.checks import adjacency_types, dual_idempotent_type

m = 3
alg = OddGraphAlgebra(m)
ctx = alg.ctx
print(f"O_{m + 1}: {ctx.vertex_count} vertices, sphere sizes {[len(s) for s in ctx.spheres]}")

# distance is read off the overlap with x0
print("first vertices:", [ctx.elements(x) for x in range(5)])
print("their distances to x0:", ctx.distances[0, :5])

types = alg.types
print(f"{len(types)} types, C(m+4, 4) = {comb(m + 4, 4)}")

# each matrix M(i,j,t,p) lives in one sphere block E*_r ... E*_c
ob = alg.orbit_basis
tt = types.types[10]
mat = ob.element(tt)
print(f"M{tuple(tt)}: {mat.nnz} ones, rows on sphere {ob.row_sphere(tt)}, columns on sphere {ob.col_sphere(tt)}")

# E*_i and A_1 are sums of basis matrices
for i in range(m + 1):
    assert alg.dual[i] == ob.element(dual_idempotent_type(i, m))
a1 = sum((np.array(ob.element(t).to_dense(), dtype=np.int64) for t in adjacency_types(m)))
assert (a1 == np.array(alg.distance_matrices.adjacency.to_dense())).all()
print("A_1 =", " + ".join(f"M{tuple(t)}" for t in adjacency_types(m)))

# products expand with nonnegative integer structure constants
stc = alg.structure_constants
a, b = adjacency_types(m)[0], adjacency_types(m)[0].transpose()
print(f"M{tuple(a)} M{tuple(b)} =", {tuple(c): n for c, n in stc.coefficients(a, b).items()})

sd = alg.spectral
print("eigenvalues in Q-polynomial order:", sd.ordered_eigenvalues)
print("multiplicities:", [sd.multiplicity(k) for k in range(m + 1)])
