"""Distance matrices, dual idempotents and the spectral data of O_{m+1}.

Elements of the Bose-Mesner algebra are handled in distance-matrix
coordinates (length m+1 vectors ``c`` meaning sum_h c[h] A_h) and
materialized as |X| x |X| matrices only on request.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .linalg import Number, RationalMatrix, as_rational, inverse, rank
from .odd_graph import GraphContext

log = logging.getLogger(__name__)


class SpectralError(RuntimeError):
    """The computed spectral data contradicts the known structure."""


@dataclass(frozen=True)
class DistanceMatrices:
    """A_0..A_m together with the intersection numbers p^h_{ij}.

    ``intersection_numbers[h][i][j]`` counts z with d(x,z)=i, d(z,y)=j for a
    fixed pair at distance h.
    """

    ctx: GraphContext
    intersection_numbers: tuple

    @property
    def diameter(self) -> int:
        return self.ctx.m

    def matrix(self, i: int) -> RationalMatrix:
        n = self.ctx.vertex_count
        rows, cols = np.nonzero(self.ctx.distances == i)
        return RationalMatrix.from_support(n, n, zip(rows.tolist(), cols.tolist()))

    @cached_property
    def a(self) -> list[RationalMatrix]:
        return [self.matrix(i) for i in range(self.diameter + 1)]

    @cached_property
    def adjacency(self) -> RationalMatrix:
        return self.matrix(1)

    @property
    def sphere_sizes(self) -> tuple[int, ...]:
        p0 = self.intersection_numbers[0]
        return tuple(p0[i][i] for i in range(self.diameter + 1))

    def p(self, h: int, i: int, j: int) -> int:
        return self.intersection_numbers[h][i][j]

    # -- Bose-Mesner coordinates ---------------------------------------
    def multiply(self, u: Sequence, v: Sequence) -> list[Number]:
        """Product of two algebra elements given in A-coordinates."""
        d = self.diameter
        out = []
        for h in range(d + 1):
            ph = self.intersection_numbers[h]
            s = 0
            for a, ua in enumerate(u):
                if ua:
                    for b, vb in enumerate(v):
                        if vb and ph[a][b]:
                            s += ua * vb * ph[a][b]
            out.append(as_rational(s))
        return out

    def times_adjacency(self, v: Sequence) -> list[Number]:
        e1 = [0] * (self.diameter + 1)
        e1[1] = 1
        return self.multiply(e1, v)

    def materialize(self, coords: Sequence) -> RationalMatrix:
        """Dense |X| x |X| matrix of sum_h coords[h] A_h."""
        n = self.ctx.vertex_count
        dist = self.ctx.distances
        return RationalMatrix(
            n, n,
            ((r, c, coords[h]) for r in range(n) for c, h in enumerate(dist[r].tolist())),
        )

    @cached_property
    def quotient_matrix(self) -> RationalMatrix:
        """Sphere quotient of A_1: entry (h, g) is the number of neighbours
        in sphere g of a vertex in sphere h."""
        d = self.diameter
        return RationalMatrix.from_dense(
            [[self.intersection_numbers[h][g][1] for g in range(d + 1)] for h in range(d + 1)]
        )


def build_distance_matrices(ctx: GraphContext) -> DistanceMatrices:
    d = ctx.m
    dist = ctx.distances
    base = dist[ctx.base_index].astype(np.int64)
    table = []
    for h in range(d + 1):
        y = ctx.spheres[h][0]
        counts = np.zeros((d + 1, d + 1), dtype=np.int64)
        np.add.at(counts, (base, dist[y].astype(np.int64)), 1)
        table.append(tuple(tuple(int(v) for v in row) for row in counts))
    return DistanceMatrices(ctx, tuple(table))


def validate_intersection_numbers(dm: DistanceMatrices) -> bool:
    """All-pairs recount of p^h_{ij}; quadratic in |X|^2, meant for small m."""
    ctx = dm.ctx
    d = dm.diameter
    dist = ctx.distances.astype(np.int64)
    n = ctx.vertex_count
    for x in range(n):
        for y in range(n):
            counts = np.zeros((d + 1, d + 1), dtype=np.int64)
            np.add.at(counts, (dist[x], dist[y]), 1)
            expect = dm.intersection_numbers[int(dist[x, y])]
            if any(int(counts[i, j]) != expect[i][j] for i in range(d + 1) for j in range(d + 1)):
                return False
    return True


@dataclass(frozen=True)
class DualIdempotents:
    estar: tuple[RationalMatrix, ...]

    def __getitem__(self, i: int) -> RationalMatrix:
        if 0 <= i < len(self.estar):
            return self.estar[i]
        n = self.estar[0].rows
        return RationalMatrix.zeros(n, n)

    def __len__(self) -> int:
        return len(self.estar)


def build_dual_idempotents(ctx: GraphContext, dm: DistanceMatrices) -> DualIdempotents:
    n = ctx.vertex_count
    row0 = ctx.distances[ctx.base_index].tolist()
    return DualIdempotents(tuple(
        RationalMatrix.from_support(n, n, ((x, x) for x in range(n) if row0[x] == i))
        for i in range(dm.diameter + 1)
    ))


@dataclass(frozen=True)
class SpectralData:
    """Primitive idempotents in distance-matrix coordinates.

    ``eigenvalues`` and ``coords`` are in discovery order (ascending
    eigenvalue).  Once a Q-polynomial ordering is attached, ``theta(k)`` and
    ``idempotent(k)`` index by Q-position: ``q_ordering[k]`` is the discovery
    index of E_k.
    """

    dm: DistanceMatrices
    eigenvalues: tuple[int, ...]
    coords: tuple[tuple[Number, ...], ...]
    krein: Optional[tuple] = None
    q_ordering: Optional[tuple[int, ...]] = None
    all_q_orderings: tuple[tuple[int, ...], ...] = ()

    def _pos(self, k: int) -> int:
        if self.q_ordering is None:
            raise SpectralError("no Q-polynomial ordering attached")
        return self.q_ordering[k]

    def theta(self, k: int) -> int:
        return self.eigenvalues[self._pos(k)]

    def idempotent(self, k: int) -> tuple[Number, ...]:
        """A-coordinates of E_k in Q-polynomial order."""
        return self.coords[self._pos(k)]

    def multiplicity(self, k: int) -> int:
        """trace(E_k) = |X| times the diagonal coefficient."""
        return int(self.dm.ctx.vertex_count * self.idempotent(k)[0])

    @property
    def ordered_eigenvalues(self) -> tuple[int, ...]:
        return tuple(self.theta(k) for k in range(len(self.eigenvalues)))

    @property
    def eigenprojectors(self) -> list[RationalMatrix]:
        return [self.dm.materialize(c) for c in self.coords]

    def projector_matrix(self, k: int) -> RationalMatrix:
        return self.dm.materialize(self.idempotent(k))

    def krein_q(self, h: int, i: int, j: int) -> Number:
        """q^h_{ij} with all three indices in Q-polynomial order."""
        if self.krein is None:
            raise SpectralError("Krein parameters not computed")
        o = self.q_ordering
        return self.krein[o[h]][o[i]][o[j]]


def is_eigenvalue(dm: DistanceMatrices, theta: int, full_check: bool = False) -> bool:
    """Whether rank(A_1 - theta I) < |X|.

    For a distance-regular graph this is decided exactly on the
    (m+1) x (m+1) sphere quotient; ``full_check`` also eliminates the full
    |X| x |X| matrix and insists both answers agree.
    """
    d = dm.diameter
    q = dm.quotient_matrix - RationalMatrix.identity(d + 1).scale(theta)
    singular = rank(q) < d + 1
    if full_check:
        n = dm.ctx.vertex_count
        full = dm.adjacency - RationalMatrix.identity(n).scale(theta)
        if (rank(full) < n) != singular:
            raise SpectralError(f"quotient and full rank disagree at theta={theta}")
    return singular


def build_primitive_idempotents(dm: DistanceMatrices, full_rank_limit: int = 35) -> SpectralData:
    d = dm.diameter
    n = dm.ctx.vertex_count
    full = n <= full_rank_limit
    thetas = [t for t in range(-(d + 1), d + 2) if is_eigenvalue(dm, t, full_check=full)]
    if len(thetas) != d + 1:
        raise SpectralError(f"found {len(thetas)} integer eigenvalues {thetas}, expected {d + 1}")
    coords = []
    for l, tl in enumerate(thetas):
        v: list[Number] = [1] + [0] * d
        for j, tj in enumerate(thetas):
            if j == l:
                continue
            av = dm.times_adjacency(v)
            v = [as_rational(Fraction(a - tj * b, tl - tj)) for a, b in zip(av, v)]
        coords.append(tuple(v))
    sd = SpectralData(dm, tuple(thetas), tuple(coords))
    check_spectral_identities(sd)
    return sd


def check_spectral_identities(sd: SpectralData) -> None:
    """Exact idempotent identities in A-coordinates; raises SpectralError."""
    dm = sd.dm
    d = dm.diameter
    n = dm.ctx.vertex_count
    identity = [1] + [0] * d
    total = [as_rational(sum(c[h] for c in sd.coords)) for h in range(d + 1)]
    if total != identity:
        raise SpectralError("idempotents do not sum to I")
    for l, cl in enumerate(sd.coords):
        if dm.times_adjacency(cl) != [as_rational(sd.eigenvalues[l] * x) for x in cl]:
            raise SpectralError(f"A_1 E != theta E for theta={sd.eigenvalues[l]}")
        for j, cj in enumerate(sd.coords):
            prod = dm.multiply(cl, cj)
            expect = list(cl) if j == l else [0] * (d + 1)
            if prod != expect:
                raise SpectralError(f"E_{l} E_{j} wrong")
    top = sd.eigenvalues.index(d + 1)
    if list(sd.coords[top]) != [Fraction(1, n)] * (d + 1):
        raise SpectralError("eigenvalue m+1 does not carry J/|X|")


def compute_krein_parameters(sd: SpectralData, n: int | None = None) -> SpectralData:
    """Solve E_i o E_j = (1/n) sum_h q^h_{ij} E_h exactly.

    Returns a copy of ``sd`` with ``krein[h][i][j]`` filled (discovery order).
    """
    n = sd.dm.ctx.vertex_count if n is None else n
    d = sd.dm.diameter
    c = RationalMatrix.from_dense([list(r) for r in sd.coords])
    cinv = inverse(c)
    table = [[[0] * (d + 1) for _ in range(d + 1)] for _ in range(d + 1)]
    for i in range(d + 1):
        for j in range(d + 1):
            had = [sd.coords[i][g] * sd.coords[j][g] for g in range(d + 1)]
            for h in range(d + 1):
                q = as_rational(n * sum(had[g] * cinv[g, h] for g in range(d + 1)))
                if q < 0:
                    raise SpectralError(f"negative Krein parameter q^{h}_{i}{j} = {q}")
                table[h][i][j] = q
    krein = tuple(tuple(tuple(r) for r in t) for t in table)
    return replace(sd, krein=krein)


def _tridiagonal_ok(krein, order: Sequence[int]) -> bool:
    """Support test q^h_{1j} != 0 iff |h-j| = 1, over the placed prefix."""
    k = len(order)
    if k < 2:
        return True
    e1 = order[1]
    for h in range(k):
        for j in range(k):
            nz = krein[order[h]][e1][order[j]] != 0
            if abs(h - j) == 1 and not nz:
                return False
            if abs(h - j) > 1 and nz:
                return False
    return True


def q_polynomial_orderings(sd: SpectralData) -> list[tuple[int, ...]]:
    """Every ordering starting at J/|X| whose Krein table is tridiagonal."""
    if sd.krein is None:
        raise SpectralError("Krein parameters not computed")
    d = sd.dm.diameter
    start = sd.eigenvalues.index(d + 1)
    found: list[tuple[int, ...]] = []

    def grow(prefix: list[int]) -> None:
        if len(prefix) == d + 1:
            found.append(tuple(prefix))
            return
        for nxt in range(d + 1):
            if nxt not in prefix:
                cand = prefix + [nxt]
                if _tridiagonal_ok(sd.krein, cand):
                    grow(cand)

    grow([start])
    return found


def find_q_polynomial_ordering(
    sd: SpectralData,
    admissible: Optional[Callable[[SpectralData], bool]] = None,
) -> SpectralData:
    """Attach the Q-polynomial ordering to ``sd``.

    With several valid orderings, those passing ``admissible`` (applied to
    ``sd`` carrying the candidate ordering) are preferred, then the
    lexicographically smallest eigenvalue sequence wins.
    """
    orders = q_polynomial_orderings(sd)
    if not orders:
        raise SpectralError("no Q-polynomial ordering exists")
    pool = orders
    if len(orders) > 1:
        log.warning("%d valid Q-polynomial orderings: %s", len(orders),
                    [[sd.eigenvalues[k] for k in o] for o in orders])
        if admissible is not None:
            good = [o for o in orders if admissible(replace(sd, q_ordering=o))]
            pool = good or orders
    chosen = min(pool, key=lambda o: [sd.eigenvalues[k] for k in o])
    return replace(sd, q_ordering=chosen, all_q_orderings=tuple(orders))


def spectral_data(dm: DistanceMatrices, **kw) -> SpectralData:
    """Idempotents, Krein parameters and Q-ordering in one call."""
    sd = build_primitive_idempotents(dm, **kw)
    sd = compute_krein_parameters(sd)
    return find_q_polynomial_ordering(sd)
