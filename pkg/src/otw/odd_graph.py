"""Vertices, distances and triple types of the Odd graph O_{m+1}.

Vertices are the m-subsets of S = {1, ..., 2m+1}, stored as integer bitmasks
(element ``e`` is bit ``e - 1``).  Two vertices are adjacent when disjoint.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import NamedTuple, Sequence

import numpy as np

MAX_M = 8


class ConfigurationError(ValueError):
    """Parameter outside the supported range."""


class InvalidTypeError(ValueError):
    """A four-tuple that is not the type of any triple of vertices."""


def subset_mask(elements) -> int:
    mask = 0
    for e in elements:
        mask |= 1 << (e - 1)
    return mask


def mask_elements(mask: int) -> tuple[int, ...]:
    out = []
    e = 1
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def distance_from_overlap(s: int, m: int) -> int:
    """Graph distance between two vertices sharing ``s`` elements."""
    if s <= (m - 1) // 2:
        return 2 * s + 1
    return 2 * m - 2 * s


def overlap_for_distance(h: int, m: int) -> int:
    """Inverse of :func:`distance_from_overlap`: |x & y| for distance ``h``."""
    return (h - 1) // 2 if h % 2 else (2 * m - h) // 2


@dataclass(frozen=True)
class GraphContext:
    """The vertex set of O_{m+1} in canonical order.

    Vertices are ordered lexicographically as sorted element tuples, so the
    base vertex {1, ..., m} always sits at index 0.
    """

    m: int
    vertices: tuple[int, ...]
    base_vertex: int
    index: dict = field(repr=False, compare=False)

    base_index = 0

    @property
    def ground_set_size(self) -> int:
        return 2 * self.m + 1

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @cached_property
    def masks(self) -> np.ndarray:
        return np.array(self.vertices, dtype=np.int64)

    @cached_property
    def base_overlap(self) -> np.ndarray:
        """|x & x0| for every vertex x."""
        return np.bitwise_count(self.masks & self.base_vertex).astype(np.int64)

    @cached_property
    def sphere_index(self) -> np.ndarray:
        """Distance from the base vertex, per vertex."""
        s = self.base_overlap
        return np.where(s <= (self.m - 1) // 2, 2 * s + 1, 2 * self.m - 2 * s)

    @cached_property
    def spheres(self) -> tuple[tuple[int, ...], ...]:
        """Vertex indices at distance h from the base vertex, h = 0..m."""
        out = [[] for _ in range(self.m + 1)]
        for x, h in enumerate(self.sphere_index.tolist()):
            out[h].append(x)
        return tuple(tuple(s) for s in out)

    @cached_property
    def distances(self) -> np.ndarray:
        """Full |X| x |X| distance table (int8)."""
        s = np.bitwise_count(self.masks[:, None] & self.masks[None, :]).astype(np.int16)
        d = np.where(s <= (self.m - 1) // 2, 2 * s + 1, 2 * self.m - 2 * s)
        return d.astype(np.int8)

    def elements(self, x: int) -> tuple[int, ...]:
        return mask_elements(self.vertices[x])


def enum_vertices(m: int) -> GraphContext:
    if not isinstance(m, int) or not 1 <= m <= MAX_M:
        raise ConfigurationError(f"m must be an integer in [1, {MAX_M}], got {m!r}")
    verts = tuple(subset_mask(c) for c in itertools.combinations(range(1, 2 * m + 2), m))
    assert len(verts) == comb(2 * m + 1, m)
    base = subset_mask(range(1, m + 1))
    assert verts[0] == base
    return GraphContext(m=m, vertices=verts, base_vertex=base,
                        index={v: k for k, v in enumerate(verts)})


def graph_distance(x: int, y: int, ctx: GraphContext) -> int:
    return distance_from_overlap(popcount(x & y), ctx.m)


class TripleType(NamedTuple):
    """Intersection pattern (|x&y|, |x&z|, |y&z|, |x&y&z|) of a vertex triple.

    In orbit-basis notation the matrix M^{t,p}_{i,j} carries the label
    ``TripleType(i, j, t, p)``: rows have |x & x0| = i, columns |y & x0| = j.
    """

    i: int
    j: int
    t: int
    p: int

    def transpose(self) -> "TripleType":
        return TripleType(self.j, self.i, self.t, self.p)


def triple_type(x: int, y: int, z: int) -> TripleType:
    return TripleType(popcount(x & y), popcount(x & z), popcount(y & z), popcount(x & y & z))


def is_valid_type(tt: Sequence[int], m: int) -> bool:
    i, j, t, p = tt
    if not (0 <= i <= m and 0 <= j <= m):
        return False
    if not max(i + j - m, m - 1 - i - j) <= t <= m - abs(i - j):
        return False
    return max(0, i + j - m, i + t - m, j + t - m) <= p <= min(i, j, t, i + j + t + 1 - m)


@dataclass(frozen=True)
class TypeIndexSet:
    m: int
    types: tuple[TripleType, ...]

    @cached_property
    def index(self) -> dict[TripleType, int]:
        return {tt: k for k, tt in enumerate(self.types)}

    def __len__(self) -> int:
        return len(self.types)

    def __iter__(self):
        return iter(self.types)

    def __contains__(self, tt) -> bool:
        return tuple(tt) in self.index


def enum_valid_types(m: int) -> TypeIndexSet:
    if m < 1:
        raise ConfigurationError(f"m must be positive, got {m}")
    types = tuple(
        TripleType(*tt)
        for tt in itertools.product(range(m + 1), repeat=4)
        if is_valid_type(tt, m)
    )
    return TypeIndexSet(m, types)


def orbit_representative(tt: Sequence[int], m: int) -> tuple[int, int, int]:
    """Canonical triple of the given type, built from consecutive intervals."""
    if not is_valid_type(tt, m):
        raise InvalidTypeError(f"{tuple(tt)} is not a triple type for m={m}")
    i, j, t, p = tt
    x = range(1, m + 1)
    y = itertools.chain(range(1, i + 1), range(m + 1, 2 * m - i + 1))
    z = itertools.chain(
        range(1, p + 1),
        range(i + 1, i + j - p + 1),
        range(m + 1, m + t - p + 1),
        range(2 * m - i + 1, 3 * m - i - j - t + p + 1),
    )
    return subset_mask(x), subset_mask(y), subset_mask(z)
