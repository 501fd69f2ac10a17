"""Homogeneous components of the standard module and the block-diagonalization.

Every irreducible module of the Terwilliger algebra of O_{m+1} (m >= 3) is
thin with endpoint nu, diameter d = m - nu and dual endpoint mu, and its
isomorphism class is fixed by (mu, d).  For each endpoint nu the space

    L_nu = {xi on sphere nu : E*_{nu-1} A_1 xi = 0}

is the nu-th slice of all modules with endpoint nu.  Seeds for the class
(mu, d) are obtained by projecting L_nu with E*_nu E_mu, after removing the
slices already assigned to smaller dual endpoints.  Each seed xi generates
one module with the orthogonal basis b_k = M xi (k = nu..m), M an orbit
basis matrix picked by the parities of nu and k - nu.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import Optional, Sequence

import numpy as np

from .bose_mesner import DistanceMatrices, DualIdempotents, SpectralData
from .checks import CheckReport, adjacency_types, dual_idempotent_type
from .linalg import (
    Number,
    RationalMatrix,
    Vector,
    as_rational,
    dot,
    gram_schmidt,
    kernel_basis,
    primitive,
    rank,
)
from .odd_graph import TripleType, is_valid_type
from .orbit_basis import OrbitBasis, StructureConstants


class UnsupportedParameterError(ValueError):
    """The decomposition is only defined for m >= 3."""


class DecompositionError(RuntimeError):
    """A structural claim about the modules failed an exact check."""


# -- index set of isomorphism classes ---------------------------------------

@dataclass(frozen=True)
class UpsilonSet:
    """Admissible (dual endpoint, diameter) pairs, ordered by d descending
    then mu ascending."""

    m: int
    pairs: tuple[tuple[int, int], ...]

    def endpoint(self, pair: tuple[int, int]) -> int:
        return self.m - pair[1]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs


def dual_endpoint_range(nu: int) -> range:
    return range((nu + 1) // 2, nu + 1)


def build_upsilon(m: int) -> UpsilonSet:
    if m < 3:
        raise UnsupportedParameterError(f"module decomposition needs m >= 3, got {m}")
    pairs = tuple((mu, d) for d in range(m, -1, -1) for mu in dual_endpoint_range(m - d))
    return UpsilonSet(m, pairs)


# -- sphere-restricted idempotents ------------------------------------------

class SphereBlocks:
    """Blocks E*_nu E_j E*_nu as integer matrices with a common denominator."""

    def __init__(self, sd: SpectralData):
        self.sd = sd
        self.ctx = sd.dm.ctx
        self._cache: dict[tuple[int, int], tuple[np.ndarray, int]] = {}

    def block(self, nu: int, j: int) -> tuple[np.ndarray, int]:
        key = (nu, j)
        if key not in self._cache:
            coeffs = self.sd.idempotent(j)
            den = lcm(*(Fraction(c).denominator for c in coeffs))
            ints = np.array([int(c * den) for c in coeffs], dtype=object)
            sphere = np.array(self.ctx.spheres[nu])
            dist = self.ctx.distances[np.ix_(sphere, sphere)].astype(np.int64)
            self._cache[key] = (ints[dist], den)
        return self._cache[key]

    def apply_scaled(self, nu: int, j: int, v: Sequence) -> np.ndarray:
        """den * E*_nu E_j v for v given on sphere nu."""
        k, _ = self.block(nu, j)
        return k.dot(np.array(v, dtype=object))

    def apply(self, nu: int, j: int, v: Sequence) -> list[Number]:
        k, den = self.block(nu, j)
        return [as_rational(Fraction(x, den)) for x in k.dot(np.array(v, dtype=object))]


def _scaled_columns(sd: SpectralData, j: int, nu: int) -> tuple[np.ndarray, int]:
    """Integer matrix D * E_j[:, sphere nu] and its denominator D."""
    ctx = sd.dm.ctx
    coeffs = sd.idempotent(j)
    den = lcm(*(Fraction(c).denominator for c in coeffs))
    ints = np.array([int(c * den) for c in coeffs], dtype=object)
    sphere = np.array(ctx.spheres[nu])
    return ints[ctx.distances[:, sphere].astype(np.int64)], den


def full_idempotent_apply(sd: SpectralData, j: int, nu: int, v_sphere: Sequence) -> list[Number]:
    """E_j v on all of X, for v supported on sphere nu."""
    mat, den = _scaled_columns(sd, j, nu)
    return [as_rational(Fraction(x) / den) for x in mat.dot(np.array(v_sphere, dtype=object))]


def restrict(v: Sequence, sphere: Sequence[int]) -> list:
    return [v[x] for x in sphere]


def lift(v: Sequence, sphere: Sequence[int], n: int) -> list:
    out = [0] * n
    for x, val in zip(sphere, v):
        out[x] = val
    return out


# -- L_nu and seed spaces ----------------------------------------------------

def compute_L_nu(nu: int, dual: DualIdempotents, dm: DistanceMatrices) -> list[Vector]:
    ctx = dm.ctx
    sphere = ctx.spheres[nu]
    n = ctx.vertex_count
    if nu == 0:
        return [lift([1], sphere, n)]
    block = dm.adjacency.submatrix(ctx.spheres[nu - 1], sphere)
    return [lift(v, sphere, n) for v in kernel_basis(block)]


@dataclass(frozen=True)
class SeedSpace:
    nu: int
    mu: int
    basis: tuple[tuple[int, ...], ...]
    squared_norms: tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.basis)


def project_Lambda(nu: int, mu: int, Lnu: Sequence[Vector], sd: SpectralData,
                   dual: DualIdempotents, lower: Sequence[SeedSpace] = (),
                   method: str = "orthogonal", blocks: Optional[SphereBlocks] = None,
                   strict: bool = True) -> SeedSpace:
    """Orthogonal basis of E*_nu (component (mu, m - nu)).

    ``method="orthogonal"`` first removes from each L_nu vector its
    components along the seed spaces in ``lower`` (the classes with smaller
    dual endpoint at this nu), then applies E*_nu E_mu.  ``method="product"``
    instead applies prod_{j=ceil(nu/2)}^{mu-1} (I - E*_nu E_j) in the written
    factor order; those factors are not projections, so this variant also
    leaks lower classes and is kept only for diagnostics.
    """
    ctx = sd.dm.ctx
    sphere = ctx.spheres[nu]
    blocks = blocks or SphereBlocks(sd)
    vecs = [restrict(v, sphere) for v in Lnu]
    if method == "orthogonal":
        low = [(restrict(u, sphere), nrm) for s in lower for u, nrm in zip(s.basis, s.squared_norms)]
        reduced = []
        for v in vecs:
            w = list(v)
            for u, nrm in low:
                c = dot(w, u)
                if c:
                    c = Fraction(c) / nrm
                    w = [as_rational(a - c * b) for a, b in zip(w, u)]
            reduced.append(w)
        vecs = reduced
    elif method == "product":
        start = (nu + 1) // 2
        out = []
        for v in vecs:
            w = list(v)
            for j in range(mu - 1, start - 1, -1):
                _, den = blocks.block(nu, j)
                ew = blocks.apply_scaled(nu, j, w)
                w = [den * a - b for a, b in zip(w, ew)]
            out.append(w)
        vecs = out
    else:
        raise ValueError(f"unknown method {method!r}")
    images = []
    for v in vecs:
        if any(v):
            img = blocks.apply_scaled(nu, mu, primitive(v))
            if any(x != 0 for x in img):
                images.append(primitive(img))
    basis, norms = [], []
    for w, _ in gram_schmidt(images):
        w = primitive(w)
        basis.append(tuple(lift(w, sphere, ctx.vertex_count)))
        norms.append(dot(w, w))
    if strict and not basis:
        raise DecompositionError(f"empty seed space for (mu, d) = ({mu}, {ctx.m - nu})")
    return SeedSpace(nu, mu, tuple(basis), tuple(norms))


def dual_endpoints_admissible(sd: SpectralData, dual: DualIdempotents) -> bool:
    """E*_nu E_j L_nu = 0 for j < ceil(nu/2) under the ordering carried by sd.

    Used to choose among several Q-polynomial orderings.
    """
    dm = sd.dm
    blocks = SphereBlocks(sd)
    for nu in range(dm.diameter + 1):
        sphere = dm.ctx.spheres[nu]
        for v in compute_L_nu(nu, dual, dm):
            vs = restrict(v, sphere)
            for j in range((nu + 1) // 2):
                if any(x != 0 for x in blocks.apply_scaled(nu, j, vs)):
                    return False
    return True


# -- module bases ------------------------------------------------------------

def b_vector_type(nu: int, k: int, m: int) -> TripleType:
    """Orbit type M with b_k = M xi for a seed xi on sphere nu."""
    if nu % 2 == 0:
        if (k - nu) % 2:
            h = (k - nu - 1) // 2
            return TripleType((k - 1) // 2, (2 * m - nu) // 2, h, h)
        return TripleType((2 * m - k) // 2, (2 * m - nu) // 2, (2 * m - k + nu) // 2, (2 * m - k) // 2)
    if (k - nu) % 2:
        return TripleType((2 * m - k) // 2, (nu - 1) // 2, (k - nu - 1) // 2, 0)
    return TripleType((k - 1) // 2, (nu - 1) // 2, (2 * m - k + nu) // 2, (nu - 1) // 2)


def build_b_vectors(nu: int, mu: int, xi: Sequence, ob: OrbitBasis) -> list[Vector]:
    m = ob.ctx.m
    out = []
    spheres = ob.ctx.spheres
    for k in range(nu, m + 1):
        tt = b_vector_type(nu, k, m)
        if not is_valid_type(tt, m):
            raise DecompositionError(f"b-vector type {tt} invalid for m={m}")
        b = ob.apply(tt, xi)
        if not any(b):
            raise DecompositionError(f"b_(nu={nu}, mu={mu}, k={k}) vanishes")
        inside = set(spheres[k])
        if any(b[x] for x in range(len(b)) if x not in inside):
            raise DecompositionError(f"b_(nu={nu}, k={k}) leaves sphere {k}")
        out.append(b)
    return out


@dataclass
class HomogeneousComponent:
    mu: int
    d: int
    nu: int
    seeds: SeedSpace
    module_bases: list[list[Vector]]
    representation_blocks: dict = field(default_factory=dict)

    @property
    def multiplicity(self) -> int:
        return len(self.module_bases)

    @property
    def block_dim(self) -> int:
        return self.d + 1

    @property
    def pair(self) -> tuple[int, int]:
        return self.mu, self.d


@dataclass
class BlockDiagReport:
    m: int
    rows: list[tuple[int, int, int, int]]
    vector_total: int
    block_square_total: int
    center_dimension: Optional[int]
    change_of_basis: list[tuple[tuple[int, int, int, int], Vector, int]]

    @property
    def multiplicities(self) -> dict[tuple[int, int], int]:
        return {(mu, d): mult for mu, d, mult, _ in self.rows}


@dataclass
class Decomposition:
    m: int
    upsilon: UpsilonSet
    L_dims: tuple[int, ...]
    components: list[HomogeneousComponent]
    report: BlockDiagReport

    def component(self, mu: int, d: int) -> HomogeneousComponent:
        return next(c for c in self.components if c.pair == (mu, d))


# -- assembly ----------------------------------------------------------------

def seed_spaces(sd: SpectralData, dual: DualIdempotents, dm: DistanceMatrices,
                method: str = "orthogonal") -> tuple[dict, tuple[int, ...]]:
    """Seed spaces for every pair of the index set, plus dim L_nu per nu."""
    m = dm.diameter
    blocks = SphereBlocks(sd)
    seeds: dict[tuple[int, int], SeedSpace] = {}
    dims = []
    for nu in range(m + 1):
        L = compute_L_nu(nu, dual, dm)
        dims.append(len(L))
        lower: list[SeedSpace] = []
        for mu in dual_endpoint_range(nu):
            s = project_Lambda(nu, mu, L, sd, dual, lower, method=method, blocks=blocks)
            seeds[(mu, m - nu)] = s
            lower.append(s)
        total = sum(s.multiplicity for s in lower)
        if method == "orthogonal" and total != len(L):
            raise DecompositionError(f"seeds at nu={nu} span {total} of dim L = {len(L)}")
    return seeds, tuple(dims)


def negative_control(nu: int, mu: int, sd: SpectralData, dual: DualIdempotents,
                     dm: DistanceMatrices, method: str = "orthogonal") -> int:
    """Dimension of the projection for a pair (mu, m - nu) outside the index set."""
    L = compute_L_nu(nu, dual, dm)
    blocks = SphereBlocks(sd)
    lower = []
    for mu2 in dual_endpoint_range(nu):
        if mu2 >= mu:
            break
        lower.append(project_Lambda(nu, mu2, L, sd, dual, lower, method=method, blocks=blocks))
    return project_Lambda(nu, mu, L, sd, dual, lower, method=method, blocks=blocks,
                          strict=False).multiplicity


def check_gram(vectors: Sequence[Vector], spheres: Sequence[Sequence[int]]) -> bool:
    """Exact orthogonality of a family of vectors each living on one sphere.

    Vectors on different spheres have disjoint supports; within a sphere the
    full Gram matrix is computed and must be diagonal with nonzero diagonal.
    """
    by_sphere: dict[int, list] = {}
    where = {}
    for h, s in enumerate(spheres):
        for x in s:
            where[x] = h
    for v in vectors:
        hs = {where[x] for x, val in enumerate(v) if val}
        if len(hs) != 1:
            return False
        h = hs.pop()
        by_sphere.setdefault(h, []).append([v[x] for x in spheres[h]])
    for rows in by_sphere.values():
        mat = np.array(rows, dtype=object)
        gram = mat.dot(mat.T)
        diag = np.diag(gram).copy()
        if any(x == 0 for x in diag):
            return False
        np.fill_diagonal(gram, 0)
        if any(x != 0 for x in gram.ravel()):
            return False
    return True


def assemble_components(seeds: dict, upsilon: UpsilonSet, ob: OrbitBasis,
                        L_dims: Sequence[int] = (), check_orthogonality: bool = True,
                        center_dimension: Optional[int] = None) -> Decomposition:
    m = ob.ctx.m
    n = ob.ctx.vertex_count
    comps = []
    columns = []
    for mu, d in upsilon:
        nu = m - d
        s = seeds[(mu, d)]
        if s.multiplicity < 1:
            raise DecompositionError(f"component ({mu}, {d}) is empty")
        bases = [build_b_vectors(nu, mu, xi, ob) for xi in s.basis]
        comps.append(HomogeneousComponent(mu, d, nu, s, bases))
        for q, mod in enumerate(bases):
            for k, b in enumerate(mod):
                columns.append(((mu, d, q, nu + k), b, dot(b, b)))
    vector_total = len(columns)
    if vector_total != n:
        raise DecompositionError(f"{vector_total} basis vectors for |X| = {n}")
    if check_orthogonality and not check_gram([c[1] for c in columns], ob.ctx.spheres):
        raise DecompositionError("assembled basis is not orthogonal")
    squares = sum((d + 1) ** 2 for _, d in upsilon)
    if squares != comb(m + 4, 4):
        raise DecompositionError(f"sum of squared block sizes {squares} != C(m+4, 4)")
    rows = [(c.mu, c.d, c.multiplicity, c.block_dim) for c in comps]
    report = BlockDiagReport(m, rows, vector_total, squares, center_dimension, columns)
    return Decomposition(m, upsilon, tuple(L_dims), comps, report)


def decompose(alg, method: str = "orthogonal", check_orthogonality: bool = True) -> Decomposition:
    """Full pipeline for an :class:`~otw.algebra.OddGraphAlgebra`."""
    upsilon = build_upsilon(alg.m)
    seeds, dims = seed_spaces(alg.spectral, alg.dual, alg.distance_matrices, method)
    return assemble_components(seeds, upsilon, alg.orbit_basis, dims, check_orthogonality)


# -- representation blocks ---------------------------------------------------

def representation_matrices(component: HomogeneousComponent, tt: Sequence[int],
                            ob: OrbitBasis) -> list[RationalMatrix]:
    """Matrix of M_tt on each module of the component, in its b-basis.

    Column k holds the coefficients of M b_k; the residual after subtracting
    them must vanish exactly.
    """
    tt = TripleType(*tt)
    size = component.block_dim
    nu = component.nu
    col = ob.col_sphere(tt)
    out = []
    for q, mod in enumerate(component.module_bases):
        norms = [dot(b, b) for b in mod]
        entries = []
        if col >= nu:
            k = col - nu
            w = ob.apply(tt, mod[k])
            resid = list(w)
            for l, bl in enumerate(mod):
                c = dot(w, bl)
                if c:
                    c = as_rational(Fraction(c) / norms[l])
                    entries.append((l, k, c))
                    resid = [as_rational(a - c * b) if b else a for a, b in zip(resid, bl)]
            if any(resid):
                raise DecompositionError(
                    f"M{tuple(tt)} moves module {q} of ({component.mu}, {component.d}) out of itself")
        out.append(RationalMatrix(size, size, entries))
    return out


def verify_block_structure(dec: Decomposition, ob: OrbitBasis, threads: int = 1,
                           strict: bool = True) -> CheckReport:
    """Residual, copy-equality and injectivity checks for every basis element.

    Fills ``representation_blocks`` of each component as a side effect.
    """
    rep = CheckReport("blockdiag")
    types = list(ob.types)

    def work(tt):
        res = []
        for comp in dec.components:
            try:
                mats = representation_matrices(comp, tt, ob)
            except DecompositionError:
                res.append((comp, None, False))
                continue
            res.append((comp, mats[0], all(mt == mats[0] for mt in mats)))
        return tt, res

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, types))
    else:
        results = [work(tt) for tt in types]

    images = []
    for tt, res in results:
        flat = []
        for comp, block, same in res:
            label = f"{tuple(tt)} on ({comp.mu}, {comp.d})"
            rep.record(f"{label}: zero residual", block is not None)
            rep.record(f"{label}: identical copies", same)
            if block is not None:
                comp.representation_blocks[tt] = block
                flat.extend(v for row in block.to_dense() for v in row)
        images.append(flat)
    if all(len(f) == len(images[0]) for f in images):
        r = rank(RationalMatrix.from_dense(images))
        rep.record(f"injective on basis: rank {r} = {len(types)}", r == len(types))
        rep.summary["image_rank"] = r
    rep.summary["block_sizes"] = [c.block_dim for c in dec.components]
    rep.summary["multiplicities"] = [c.multiplicity for c in dec.components]
    return rep.require() if strict else rep


def scalar_block_dimension(dec: Decomposition, ob: OrbitBasis) -> int:
    """Dimension of the elements whose every block is a scalar matrix."""
    types = list(ob.types)
    cons = []
    for comp in dec.components:
        size = comp.block_dim
        blocks = [comp.representation_blocks[tt] for tt in types]
        for r in range(size):
            for c in range(size):
                if r != c:
                    cons.append([b[r, c] for b in blocks])
                elif r > 0:
                    cons.append([b[r, r] - b[0, 0] for b in blocks])
    return len(types) - rank(RationalMatrix.from_dense(cons))


def center_dimension(ob: OrbitBasis, st: StructureConstants) -> int:
    """Dimension of the center, as the commutant of the generators A_1, E*_i
    computed in orbit-basis coordinates."""
    m = ob.ctx.m
    k = len(ob.types)
    gens = [{ob.index(tt): 1 for tt in adjacency_types(m)}]
    gens += [{ob.index(dual_idempotent_type(i, m)): 1} for i in range(m + 1)]
    rows = [[0] * k for _ in range(k * len(gens))]
    for a in range(k):
        e = {a: 1}
        for g_i, g in enumerate(gens):
            left, right = st.product(g, e), st.product(e, g)
            for c in set(left) | set(right):
                rows[g_i * k + c][a] = left.get(c, 0) - right.get(c, 0)
    return k - rank(RationalMatrix.from_dense(rows))


# -- cross-checks --------------------------------------------------------------

def spectral_multiplicity_check(dec: Decomposition, sd: SpectralData) -> list[tuple[int, int, int]]:
    """(i, trace E_i, sum of m(mu, d) with mu <= i <= mu + d) per Q-index i."""
    out = []
    for i in range(dec.m + 1):
        s = sum(c.multiplicity for c in dec.components if c.mu <= i <= c.mu + c.d)
        out.append((i, sd.multiplicity(i), s))
    return out


def dual_endpoint_witness(comp: HomogeneousComponent, sd: SpectralData) -> bool:
    """E_j xi = 0 for j < mu and E_mu xi != 0, for every seed of the component."""
    sphere = sd.dm.ctx.spheres[comp.nu]
    seeds = np.array([restrict(xi, sphere) for xi in comp.seeds.basis], dtype=object).T
    for j in range(comp.mu + 1):
        image = _scaled_columns(sd, j, comp.nu)[0].dot(seeds)
        nonzero = (image != 0).any(axis=0)
        if j < comp.mu and nonzero.any():
            return False
        if j == comp.mu and not nonzero.all():
            return False
    return True


def raising_chain_witness(comp: HomogeneousComponent, dm: DistanceMatrices) -> bool:
    """E*_{k+1} A_1 b_k != 0 for nu <= k < m, in every module."""
    spheres = dm.ctx.spheres
    a1 = dm.adjacency
    for mod in comp.module_bases:
        for off, b in enumerate(mod[:-1]):
            k = comp.nu + off
            w = a1.apply(b)
            if not any(w[x] for x in spheres[k + 1]):
                return False
    return True


def verify_decomposition(alg, threads: int = 1, strict: bool = True
                         ) -> tuple[Optional[Decomposition], CheckReport]:
    """Every exact check on the decomposition of ``alg`` in one report.

    Returns the decomposition (None if it could not be assembled) with the
    representation blocks filled in.
    """
    m = alg.m
    rep = CheckReport("blockdiag")
    ob = alg.orbit_basis
    try:
        dec = decompose(alg, check_orthogonality=False)
    except DecompositionError as e:
        rep.record(f"assembly: {e}", False)
        return None, (rep.require() if strict else rep)
    n = alg.ctx.vertex_count
    rows = dec.report.rows
    for mu, d, mult, _ in rows:
        rep.record(f"({mu}, {d}) has multiplicity {mult} >= 1", mult >= 1)
    rep.record(f"components {len(rows)} = floor((m+2)^2/4)", len(rows) == (m + 2) ** 2 // 4)
    rep.record(f"sum m(mu,d)(d+1) = {n}", sum(r[2] * r[3] for r in rows) == n)
    rep.record("sum (d+1)^2 = C(m+4, 4)", dec.report.block_square_total == comb(m + 4, 4))
    vecs = [c[1] for c in dec.report.change_of_basis]
    rep.record("b-vectors nonzero", all(any(v) for v in vecs))
    rep.record(f"Gram matrix of {len(vecs)} b-vectors is diagonal", check_gram(vecs, alg.ctx.spheres))
    blocks = verify_block_structure(dec, ob, threads=threads, strict=False)
    rep.items.extend(blocks.items)
    rep.summary.update(blocks.summary)
    centre = center_dimension(ob, alg.structure_constants)
    dec.report.center_dimension = centre
    rep.record(f"center dimension {centre} = {len(rows)}", centre == len(rows))
    if blocks.passed:
        rep.record("block-scalar elements span the center", scalar_block_dimension(dec, ob) == centre)
    for i, tr, s in spectral_multiplicity_check(dec, alg.spectral):
        rep.record(f"trace E_{i} = {tr} = {s}", tr == s)
    for comp in dec.components:
        rep.record(f"({comp.mu}, {comp.d}) dual endpoint", dual_endpoint_witness(comp, alg.spectral))
        rep.record(f"({comp.mu}, {comp.d}) raising chain", raising_chain_witness(comp, alg.distance_matrices))
    rep.summary["center_dimension"] = centre
    return dec, (rep.require() if strict else rep)
