"""Orbit basis M^{t,p}_{i,j} of the centralizer algebra and its structure constants.

The whole basis is stored as one |X| x |X| label array: entry (x, y) holds the
index (in the canonical type order) of the type of (x0, x, y).  Individual
basis matrices are materialized on demand.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .linalg import Number, RationalMatrix, Vector, as_rational
from .odd_graph import GraphContext, TripleType, TypeIndexSet, distance_from_overlap


class ConsistencyError(RuntimeError):
    """Internal data disagrees with an exact cross-check."""


@dataclass(frozen=True, eq=False)
class OrbitBasis:
    ctx: GraphContext
    types: TypeIndexSet
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.types)

    def index(self, tt: Sequence[int]) -> int:
        return self.types.index[TripleType(*tt)]

    @cached_property
    def _pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        flat = self.labels.ravel()
        order = np.argsort(flat, kind="stable")
        bounds = np.searchsorted(flat[order], np.arange(len(self.types) + 1))
        n = self.ctx.vertex_count
        out = []
        for k in range(len(self.types)):
            sel = order[bounds[k]:bounds[k + 1]]
            out.append((sel // n, sel % n))
        return out

    def pairs(self, tt: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        """Row and column indices of the support of M_tt, row-major sorted."""
        return self._pairs[self.index(tt)]

    def element(self, tt: Sequence[int]) -> RationalMatrix:
        rows, cols = self.pairs(tt)
        n = self.ctx.vertex_count
        return RationalMatrix.from_support(n, n, zip(rows.tolist(), cols.tolist()))

    @property
    def elements(self) -> dict[TripleType, RationalMatrix]:
        return {tt: self.element(tt) for tt in self.types}

    def row_sphere(self, tt: Sequence[int]) -> int:
        return distance_from_overlap(tt[0], self.ctx.m)

    def col_sphere(self, tt: Sequence[int]) -> int:
        return distance_from_overlap(tt[1], self.ctx.m)

    def apply(self, tt: Sequence[int], v: Sequence) -> Vector:
        """M_tt v for an exact vector v."""
        rows, cols = self.pairs(tt)
        out: list[Number] = [0] * self.ctx.vertex_count
        for r, c in zip(rows.tolist(), cols.tolist()):
            x = v[c]
            if x:
                out[r] += x
        return [as_rational(x) for x in out]

    def combination(self, coords: Mapping[int, Number]) -> RationalMatrix:
        """Matrix of sum_a coords[a] M_a (keys are type indices)."""
        n = self.ctx.vertex_count
        data = []
        for a, c in coords.items():
            rows, cols = self._pairs[a]
            data.extend((r, cc, c) for r, cc in zip(rows.tolist(), cols.tolist()))
        return RationalMatrix(n, n, data)


def build_orbit_basis(ctx: GraphContext, types: TypeIndexSet) -> OrbitBasis:
    m = ctx.m
    masks = ctx.masks
    s0 = ctx.base_overlap
    inter = masks[:, None] & masks[None, :]
    t = np.bitwise_count(inter).astype(np.int64)
    p = np.bitwise_count(inter & ctx.base_vertex).astype(np.int64)
    code = np.full((m + 1,) * 4, -1, dtype=np.int32)
    for k, tt in enumerate(types.types):
        code[tt] = k
    labels = code[s0[:, None], s0[None, :], t, p]
    if (labels < 0).any():
        x, y = map(int, np.argwhere(labels < 0)[0])
        raise ConsistencyError(f"pair ({x}, {y}) has a type outside the index set")
    counts = np.bincount(labels.ravel(), minlength=len(types))
    if (counts == 0).any():
        missing = types.types[int(np.flatnonzero(counts == 0)[0])]
        raise ConsistencyError(f"type {missing} has no pair")
    dtype = np.int16 if len(types) < 2**15 else np.int32
    return OrbitBasis(ctx, types, labels.astype(dtype))


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """M_a M_b = sum_c table[a][b][c] M_c, keyed by type index."""

    types: TypeIndexSet
    table: dict

    def coefficients(self, a: Sequence[int], b: Sequence[int]) -> dict[TripleType, int]:
        ia, ib = self.types.index[TripleType(*a)], self.types.index[TripleType(*b)]
        row = self.table.get(ia, {}).get(ib, {})
        return {self.types.types[c]: n for c, n in sorted(row.items())}

    def product(self, u: Mapping[int, Number], v: Mapping[int, Number]) -> dict[int, Number]:
        """Product of two algebra elements in orbit-basis coordinates."""
        out: dict[int, Number] = defaultdict(int)
        for a, ua in u.items():
            row = self.table.get(a)
            if not row or not ua:
                continue
            for b, vb in v.items():
                prod = row.get(b)
                if prod and vb:
                    f = ua * vb
                    for c, n in prod.items():
                        out[c] += f * n
        return {c: as_rational(x) for c, x in sorted(out.items()) if x}

    def items(self):
        """(a, b, {c: n}) in canonical order."""
        for a in sorted(self.table):
            for b in sorted(self.table[a]):
                yield a, b, dict(sorted(self.table[a][b].items()))


def structure_constants(ob: OrbitBasis, ctx: GraphContext | None = None) -> StructureConstants:
    """Count, for one representative (x, y) of each output type c, the
    vertices z with (x0, x, z) of type a and (x0, z, y) of type b."""
    labels = ob.labels.astype(np.int64)
    k = len(ob.types)
    _, first = np.unique(labels.ravel(), return_index=True)
    n = ob.ctx.vertex_count
    table: dict[int, dict[int, dict[int, int]]] = {}
    for c in range(k):
        x, y = divmod(int(first[c]), n)
        key = labels[x, :] * k + labels[:, y]
        vals, cnt = np.unique(key, return_counts=True)
        for v, num in zip(vals.tolist(), cnt.tolist()):
            a, b = divmod(v, k)
            table.setdefault(a, {}).setdefault(b, {})[c] = num
    return StructureConstants(ob.types, table)


def verify_structure_constants(ob: OrbitBasis, st: StructureConstants) -> bool:
    """Compare every product M_a M_b against the full matrix product."""
    for a, ta in enumerate(ob.types.types):
        ma = ob.element(ta)
        for b, tb in enumerate(ob.types.types):
            full = ma @ ob.element(tb)
            expect = ob.combination(st.table.get(a, {}).get(b, {}))
            if full != expect:
                raise ConsistencyError(f"structure constants wrong for {ta} * {tb}")
    return True
