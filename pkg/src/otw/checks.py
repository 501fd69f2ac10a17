"""Exact verifications that the orbit basis spans the Terwilliger algebra."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Iterable

from .bose_mesner import DistanceMatrices, DualIdempotents
from .linalg import Echelon, RationalMatrix
from .odd_graph import (
    GraphContext,
    TripleType,
    is_valid_type,
    subset_mask,
    mask_elements,
)
from .orbit_basis import OrbitBasis, StructureConstants


class VerificationError(AssertionError):
    """An exact identity failed."""


@dataclass
class CheckReport:
    """Outcome of one named check: per-item pass/fail plus summary values."""

    name: str
    items: list[tuple[str, bool]] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.items)

    @property
    def failures(self) -> list[str]:
        return [label for label, ok in self.items if not ok]

    def record(self, label: str, ok: bool) -> bool:
        self.items.append((label, bool(ok)))
        return ok

    def require(self) -> "CheckReport":
        if not self.passed:
            raise VerificationError(f"{self.name} failed at {self.failures[0]}")
        return self


def _finish(report: CheckReport, strict: bool) -> CheckReport:
    return report.require() if strict else report


# -- generator identities -------------------------------------------------

def dual_idempotent_type(i: int, m: int) -> TripleType:
    """Type whose orbit matrix equals E*_i."""
    s = (2 * m - i) // 2 if i % 2 == 0 else (i - 1) // 2
    return TripleType(s, s, m, s)


def raising_type(i: int, m: int) -> TripleType:
    """Type of E*_{i+1} A_1 E*_i."""
    if i % 2 == 0:
        return TripleType(i // 2, (2 * m - i) // 2, 0, 0)
    return TripleType((2 * m - i - 1) // 2, (i - 1) // 2, 0, 0)


def lowering_type(i: int, m: int) -> TripleType:
    """Type of E*_i A_1 E*_{i+1}."""
    if i % 2 == 0:
        return TripleType((2 * m - i) // 2, i // 2, 0, 0)
    return TripleType((i - 1) // 2, (2 * m - i - 1) // 2, 0, 0)


def flat_type(m: int) -> TripleType:
    """Type of E*_m A_1 E*_m."""
    return TripleType(m // 2, m // 2, 0, 0)


def adjacency_types(m: int) -> list[TripleType]:
    """Orbit types summing to A_1 (raising, lowering for i < m, plus flat)."""
    out = []
    for i in range(m):
        out += [raising_type(i, m), lowering_type(i, m)]
    return out + [flat_type(m)]


def _element_or_none(ob: OrbitBasis, tt: TripleType):
    if not is_valid_type(tt, ob.ctx.m):
        return None
    return ob.element(tt)


def verify_generator_identities(ob: OrbitBasis, dual: DualIdempotents, dm: DistanceMatrices,
                  strict: bool = True) -> CheckReport:
    m = ob.ctx.m
    a1 = dm.adjacency
    rep = CheckReport("prop35")
    for i in range(m + 1):
        case = "even" if i % 2 == 0 else "odd"
        rep.record(f"(i) E*_{i} [{case}]", dual[i] == _element_or_none(ob, dual_idempotent_type(i, m)))
    for i in range(m):
        case = "even" if i % 2 == 0 else "odd"
        up = dual[i + 1] @ a1 @ dual[i]
        rep.record(f"(ii) E*_{i + 1} A1 E*_{i} [{case}]", up == _element_or_none(ob, raising_type(i, m)))
        down = dual[i] @ a1 @ dual[i + 1]
        rep.record(f"(iii) E*_{i} A1 E*_{i + 1} [{case}]", down == _element_or_none(ob, lowering_type(i, m)))
    rep.record("(iv) E*_m A1 E*_m", dual[m] @ a1 @ dual[m] == _element_or_none(ob, flat_type(m)))
    total = RationalMatrix.zeros(ob.ctx.vertex_count)
    for tt in adjacency_types(m):
        total = total + ob.element(tt)
    rep.record("(v) A1 = sum of orbit matrices", total == a1)
    return _finish(rep, strict)


def verify_almost_bipartite(dual: DualIdempotents, dm: DistanceMatrices,
                            strict: bool = True) -> CheckReport:
    """E*_j A_1 E*_i = 0 for |i-j| > 1, and E*_i A_1 E*_i = 0 for i < m."""
    m = dm.diameter
    a1 = dm.adjacency
    rep = CheckReport("almost-bipartite")
    for i in range(m + 1):
        for j in range(m + 1):
            if abs(i - j) > 1 or (i == j and i < m):
                rep.record(f"E*_{j} A1 E*_{i} = 0", (dual[j] @ a1 @ dual[i]).is_zero())
    return _finish(rep, strict)


# -- centralizer ------------------------------------------------------------

def vertex_permutation(ctx: GraphContext, sigma: dict[int, int]) -> list[int]:
    """Index map x -> sigma(x) induced by a permutation of the ground set."""
    out = []
    for v in ctx.vertices:
        img = subset_mask(sigma.get(e, e) for e in mask_elements(v))
        out.append(ctx.index[img])
    return out


def permutation_matrix(perm: list[int]) -> RationalMatrix:
    n = len(perm)
    return RationalMatrix.from_support(n, n, ((perm[x], x) for x in range(n)))


def _cycle(elements: list[int]) -> dict[int, int]:
    return {e: elements[(k + 1) % len(elements)] for k, e in enumerate(elements)}


def stabilizer_generators(m: int) -> list[tuple[str, dict[int, int]]]:
    """Generators of Sym({1..m}) x Sym({m+1..2m+1}).

    A transposition and a full cycle on each part; parts of size one
    contribute nothing.
    """
    first = list(range(1, m + 1))
    second = list(range(m + 1, 2 * m + 2))
    gens = []
    if m >= 2:
        gens.append(("(1 2)", {1: 2, 2: 1}))
        gens.append((f"cycle 1..{m}", _cycle(first)))
    gens.append((f"({m + 1} {m + 2})", {m + 1: m + 2, m + 2: m + 1}))
    gens.append((f"cycle {m + 1}..{2 * m + 1}", _cycle(second)))
    return gens


def stabilizer_elements(m: int) -> Iterable[dict[int, int]]:
    """Every element of Sym({1..m}) x Sym({m+1..2m+1})."""
    first = list(range(1, m + 1))
    second = list(range(m + 1, 2 * m + 2))
    for p1 in itertools.permutations(first):
        for p2 in itertools.permutations(second):
            sigma = dict(zip(first, p1))
            sigma.update(zip(second, p2))
            yield sigma


def verify_centralizer(ob: OrbitBasis, ctx: GraphContext | None = None,
                       generators=None, strict: bool = True) -> CheckReport:
    ctx = ob.ctx if ctx is None else ctx
    gens = stabilizer_generators(ctx.m) if generators is None else generators
    rep = CheckReport("centralizer")
    perms = [(name, permutation_matrix(vertex_permutation(ctx, s))) for name, s in gens]
    for tt in ob.types:
        mat = ob.element(tt)
        for name, pm in perms:
            rep.record(f"{tuple(tt)} vs {name}", pm @ mat == mat @ pm)
    rep.summary["generators"] = [name for name, _ in gens]
    return _finish(rep, strict)


def _union_find_classes(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return [find(a) for a in range(n)]


def _same_partition(classes: list[int], labels: list) -> bool:
    fwd, back = {}, {}
    for c, l in zip(classes, labels):
        if fwd.setdefault(c, l) != l or back.setdefault(l, c) != c:
            return False
    return True


def brute_force_stabilizer_orbits(ob: OrbitBasis) -> bool:
    """Orbits of the whole stabilizer on x0 x X x X equal the type fibers."""
    ctx = ob.ctx
    n = ctx.vertex_count
    perms = [vertex_permutation(ctx, s) for s in stabilizer_elements(ctx.m)]
    edges = ((x * n + y, p[x] * n + p[y]) for p in perms for x in range(n) for y in range(n))
    classes = _union_find_classes(n * n, edges)
    return _same_partition(classes, ob.labels.ravel().tolist())


def brute_force_full_orbits(ctx: GraphContext) -> bool:
    """Orbits of Sym(2m+1) on X^3 equal the fibers of the triple type."""
    from .odd_graph import triple_type

    n = ctx.vertex_count
    ground = list(range(1, 2 * ctx.m + 2))
    perms = [vertex_permutation(ctx, dict(zip(ground, img)))
             for img in itertools.permutations(ground)]
    idx = lambda x, y, z: (x * n + y) * n + z  # noqa: E731
    edges = ((idx(x, y, z), idx(p[x], p[y], p[z]))
             for p in perms for x in range(n) for y in range(n) for z in range(n))
    classes = _union_find_classes(n ** 3, edges)
    v = ctx.vertices
    labels = [triple_type(v[x], v[y], v[z])
              for x in range(n) for y in range(n) for z in range(n)]
    return _same_partition(classes, labels)


# -- generation ---------------------------------------------------------------

def generator_coordinates(ob: OrbitBasis) -> dict[str, dict[int, int]]:
    m = ob.ctx.m
    gens = {"A1": {}}
    for tt in adjacency_types(m):
        gens["A1"][ob.index(tt)] = 1
    for i in range(m + 1):
        gens[f"E*_{i}"] = {ob.index(dual_idempotent_type(i, m)): 1}
    return gens


def generated_dimension(ob: OrbitBasis, st: StructureConstants) -> int:
    """Dimension of the algebra generated by A_1 and the E*_i, closed under
    the structure-constant product."""
    k = len(ob.types)
    gens = list(generator_coordinates(ob).values())
    ech = Echelon(k)
    queue = []
    for g in gens:
        if ech.add(_dense(g, k)):
            queue.append(g)
    while queue:
        w = queue.pop()
        for g in gens:
            for prod in (st.product(g, w), st.product(w, g)):
                if prod and ech.add(_dense(prod, k)):
                    queue.append(prod)
    return ech.rank


def _dense(coords: dict, k: int) -> list:
    v = [0] * k
    for a, c in coords.items():
        v[a] = c
    return v


def verify_generation(ob: OrbitBasis, st: StructureConstants, dual=None, dm=None,
                      strict: bool = True) -> CheckReport:
    m = ob.ctx.m
    rep = CheckReport("generation")
    dim = generated_dimension(ob, st)
    target = comb(m + 4, 4)
    rep.summary.update(dimension=dim, expected=target)
    rep.record(f"generated dimension {dim} = C({m}+4, 4) = {target}", dim == target)
    rep.record(f"basis size {len(ob.types)} = {target}", len(ob.types) == target)
    return _finish(rep, strict)


def verify_dimensions(ob_types, m: int, strict: bool = True) -> CheckReport:
    rep = CheckReport("dims")
    target = comb(m + 4, 4)
    rep.summary.update(dimension=len(ob_types), expected=target)
    rep.record(f"|I_{m}| = {len(ob_types)} = C({m}+4, 4) = {target}", len(ob_types) == target)
    return _finish(rep, strict)


# -- alternating products -------------------------------------------------------

def path_product_identity(i: int, k: int, m: int) -> tuple[str, int, TripleType]:
    """Case label, scalar and orbit type for E*_{i+k} A1 ... A1 E*_i."""
    if k % 2:
        h = (k - 1) // 2
        coeff = factorial(h) ** 2 * (k + 1) // 2
        if i % 2 == 0:
            return "i", coeff, TripleType((i + k - 1) // 2, (2 * m - i) // 2, h, h)
        return "iii", coeff, TripleType((2 * m - i - k) // 2, (i - 1) // 2, h, 0)
    coeff = factorial(k // 2) ** 2
    if i % 2 == 0:
        return "ii", coeff, TripleType((2 * m - i - k) // 2, (2 * m - i) // 2,
                                      (2 * m - k) // 2, (2 * m - i - k) // 2)
    return "iv", coeff, TripleType((i + k - 1) // 2, (i - 1) // 2, (2 * m - k) // 2, (i - 1) // 2)


def verify_path_products(ob: OrbitBasis, dual: DualIdempotents, dm: DistanceMatrices,
                   strict: bool = True) -> CheckReport:
    m = ob.ctx.m
    a1 = dm.adjacency
    steps = [None] + [dual[s] @ a1 @ dual[s - 1] for s in range(1, m + 1)]
    rep = CheckReport("lemma51")
    for i in range(m + 1):
        prod = dual[i]
        for k in range(1, m - i + 1):
            prod = steps[i + k] @ prod
            case, coeff, tt = path_product_identity(i, k, m)
            target = _element_or_none(ob, tt)
            ok = target is not None and prod == target.scale(coeff)
            rep.record(f"i={i} k={k} case ({case}): {coeff} * M{tuple(tt)}", ok)
    return _finish(rep, strict)
