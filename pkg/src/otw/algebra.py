"""Lazily built bundle of everything attached to one Odd graph."""
from __future__ import annotations

from functools import cached_property

from .bose_mesner import (
    DistanceMatrices,
    DualIdempotents,
    SpectralData,
    build_distance_matrices,
    build_dual_idempotents,
    build_primitive_idempotents,
    compute_krein_parameters,
    find_q_polynomial_ordering,
)
from .odd_graph import GraphContext, TripleType, TypeIndexSet, enum_valid_types, enum_vertices
from .orbit_basis import OrbitBasis, StructureConstants, build_orbit_basis, structure_constants


class OddGraphAlgebra:
    """Graph, Bose-Mesner data, orbit basis and structure constants for O_{m+1}.

    Every attribute is computed on first access and then cached.
    """

    def __init__(self, m: int):
        self.ctx: GraphContext = enum_vertices(m)
        self.m = m

    @cached_property
    def types(self) -> TypeIndexSet:
        return enum_valid_types(self.m)

    @cached_property
    def orbit_basis(self) -> OrbitBasis:
        return build_orbit_basis(self.ctx, self.types)

    @cached_property
    def distance_matrices(self) -> DistanceMatrices:
        return build_distance_matrices(self.ctx)

    @cached_property
    def dual(self) -> DualIdempotents:
        return build_dual_idempotents(self.ctx, self.distance_matrices)

    @cached_property
    def spectral(self) -> SpectralData:
        sd = build_primitive_idempotents(self.distance_matrices)
        sd = compute_krein_parameters(sd, self.ctx.vertex_count)
        if self.m >= 3:
            from .decomposition import dual_endpoints_admissible
            admissible = lambda cand: dual_endpoints_admissible(cand, self.dual)  # noqa: E731
        else:
            admissible = None
        return find_q_polynomial_ordering(sd, admissible)

    @cached_property
    def structure_constants(self) -> StructureConstants:
        return structure_constants(self.orbit_basis, self.ctx)

    def M(self, i: int, j: int, t: int, p: int):
        """The basis matrix M^{t,p}_{i,j}."""
        return self.orbit_basis.element(TripleType(i, j, t, p))
