"""
Block-diagonalizing the algebra for m = 4
=========================================

The standard module splits into thin irreducible modules indexed by a dual
endpoint mu and a diameter d.  Each class contributes one (d+1) x (d+1)
block, so the algebra is a direct sum of full matrix algebras and its
dimension is the sum of (d+1)^2.
"""
from otw.algebra import OddGraphAlgebra
from otw.checks import adjacency_types
from otw.decomposition import verify_decomposition

m = 4
alg = OddGraphAlgebra(m)
dec, report = verify_decomposition(alg)
print(f"{len(report.items)} exact checks passed")

print(" mu  d  block  copies")
for mu, d, mult, size in dec.report.rows:
    print(f"{mu:3d} {d:2d} {size:6d} {mult:7d}")
print("sum of squares:", dec.report.block_square_total, " center dimension:", dec.report.center_dimension)

# The adjacency matrix is a sum of basis elements, so its block in each
# component is the sum of their blocks: a tridiagonal matrix.
comp = dec.component(0, m)
block = None
for tt in adjacency_types(m):
    b = comp.representation_blocks[tt]
    block = b if block is None else block + b
print(f"A_1 on the primary module (mu=0, d={m}):")
for row in block.to_dense():
    print("   ", [str(x) for x in row])

# the b-vectors of one module, with their squared norms
comp = dec.component(2, 2)
print(f"(mu, d) = (2, 2): endpoint {comp.nu}, {comp.multiplicity} copies")
for k, b in enumerate(comp.module_bases[0]):
    support = sum(1 for x in b if x)
    print(f"  b_{comp.nu + k}: support {support} vertices on sphere {comp.nu + k}, |b|^2 = {sum(x * x for x in b)}")
