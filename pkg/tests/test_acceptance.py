"""Acceptance criteria 1-10, each reported as one PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""
import sys
import tempfile
import time
from math import comb
from pathlib import Path

from otw.algebra import OddGraphAlgebra
from otw.checks import (
    brute_force_stabilizer_orbits,
    generated_dimension,
    stabilizer_elements,
    verify_centralizer,
    verify_generator_identities,
    verify_path_products,
)
from otw.cli import main as otw_main
from otw.decomposition import (
    build_upsilon,
    check_gram,
    negative_control,
    raising_chain_witness,
    spectral_multiplicity_check,
    verify_decomposition,
)
from otw.odd_graph import enum_valid_types

RESULTS: dict[int, tuple[bool, str]] = {}

_cache: dict[int, tuple] = {}


def _decomposed(m):
    if m not in _cache:
        alg = OddGraphAlgebra(m)
        t0 = time.perf_counter()
        dec, rep = verify_decomposition(alg, strict=False)
        _cache[m] = (alg, dec, rep, time.perf_counter() - t0)
    return _cache[m]


def _report(n: int, ok: bool, text: str) -> None:
    RESULTS[n] = (ok, text)
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
    assert ok, text


def test_criterion_01_dimension_law():
    counts = [len(enum_valid_types(m)) for m in range(1, 7)]
    dims, times = [], []
    for m in range(1, 5):
        t0 = time.perf_counter()
        alg = OddGraphAlgebra(m)
        dims.append(generated_dimension(alg.orbit_basis, alg.structure_constants))
        times.append(time.perf_counter() - t0)
    ok = (counts == [5, 15, 35, 70, 126, 210] and dims == [5, 15, 35, 70]
          and max(times[:3]) < 10 and times[3] < 120)
    _report(1, ok, f"|I_m| = {counts}; generated {dims}; times {[round(t, 2) for t in times]} s")


def test_criterion_02_centralizer():
    group = len(list(stabilizer_elements(2)))
    brute = brute_force_stabilizer_orbits(OddGraphAlgebra(2).orbit_basis)
    commute = [verify_centralizer(OddGraphAlgebra(m).orbit_basis, strict=False).passed for m in range(1, 5)]
    ok = group == 12 and brute and all(commute)
    _report(2, ok, f"m=2 brute force over {group} elements: {brute}; generator commutation m=1..4: {commute}")


def test_criterion_03_generator_identities():
    passed, items = [], 0
    for m in range(1, 6):
        alg = OddGraphAlgebra(m)
        rep = verify_generator_identities(alg.orbit_basis, alg.dual, alg.distance_matrices, strict=False)
        passed.append(rep.passed)
        items += len(rep.items)
    _report(3, all(passed), f"{items} identities for m=1..5, all exact: {passed}")


def test_criterion_04_path_products():
    out = {}
    for m in (3, 4):
        alg = OddGraphAlgebra(m)
        rep = verify_path_products(alg.orbit_basis, alg.dual, alg.distance_matrices, strict=False)
        out[m] = (rep.passed, len(rep.items))
    ok = all(p for p, _ in out.values())
    _report(4, ok, "; ".join(f"m={m}: {k} (i,k) pairs {'pass' if p else 'fail'}" for m, (p, k) in out.items()))


def test_criterion_05_accounting():
    parts, ok = [], True
    for m in (3, 4, 5):
        alg, dec, rep, secs = _decomposed(m)
        rows = dec.report.rows if dec else []
        good = (
            dec is not None
            and all(mult >= 1 for _, _, mult, _ in rows)
            and sum(mult * size for _, _, mult, size in rows) == comb(2 * m + 1, m)
            and sum(size ** 2 for _, _, _, size in rows) == comb(m + 4, 4)
            and len(rows) == (m + 2) ** 2 // 4
            and (m < 5 or secs < 1800)
        )
        ok &= good
        parts.append(f"m={m}: {len(rows)} components{'' if good else ' FAIL'} ({secs:.1f} s)")
    _report(5, ok, "; ".join(parts))


def test_criterion_06_block_diagonal():
    parts, ok = [], True
    for m in (3, 4):
        alg, dec, rep, _ = _decomposed(m)
        residual = [s for label, s in rep.items if label.endswith("zero residual")]
        copies = [s for label, s in rep.items if label.endswith("identical copies")]
        good = (len(residual) == comb(m + 4, 4) * len(dec.components) and all(residual)
                and all(copies) and rep.summary.get("image_rank") == comb(m + 4, 4))
        ok &= good
        parts.append(f"m={m}: {comb(m + 4, 4)} elements x {len(dec.components)} components exact")
    _report(6, ok, "; ".join(parts))


def test_criterion_07_orthogonal_basis():
    parts, ok = [], True
    for m in (3, 4):
        alg, dec, _, _ = _decomposed(m)
        vecs = [c[1] for c in dec.report.change_of_basis]
        good = (len(vecs) == comb(2 * m + 1, m)
                and check_gram(vecs, alg.ctx.spheres)
                and all(any(v) for v in vecs)
                and all(raising_chain_witness(c, alg.distance_matrices) for c in dec.components))
        ok &= good
        parts.append(f"m={m}: {len(vecs)} b-vectors, diagonal Gram")
    _report(7, ok, "; ".join(parts))


def test_criterion_08_negative_controls():
    alg = OddGraphAlgebra(3)
    ups = build_upsilon(3)
    dims = {}
    for mu, d in [(0, 1), (0, 0), (1, 0), (3, 1)]:
        assert (mu, d) not in ups
        dims[(mu, d)] = negative_control(3 - d, mu, alg.spectral, alg.dual, alg.distance_matrices)
    zero = [p for p, k in dims.items() if k == 0]
    _report(8, len(zero) >= 2 and len(zero) == len(dims), f"m=3 pairs outside the index set give dimensions {dims}")


def test_criterion_09_spectral_cross_check():
    parts, ok = [], True
    for m in (3, 4):
        alg, dec, _, _ = _decomposed(m)
        rows = spectral_multiplicity_check(dec, alg.spectral)
        ok &= all(tr == s for _, tr, s in rows)
        parts.append(f"m={m}: {[tr for _, tr, _ in rows]}")
    _report(9, ok, "trace E_i = support sums; " + "; ".join(parts))


def test_criterion_10_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for threads in ("1", "4"):
            out = Path(tmp) / f"t{threads}"
            code = otw_main(["export", "-m", "3", "--out", str(out), "--threads", threads])
            assert code == 0
            outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        same = outs[0] == outs[1] and len(outs[0]) > 0
        _report(10, same, f"m=3 export with 1 and 4 threads: {len(outs[0])} files byte-identical")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
