"""Command-line driver: ``otw build|verify|decompose|export -m <int>``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .algebra import OddGraphAlgebra
from .checks import (
    CheckReport,
    VerificationError,
    verify_centralizer,
    verify_dimensions,
    verify_generation,
    verify_generator_identities,
    verify_path_products,
)
from .decomposition import verify_decomposition
from .export import ExportError, collect_bundle, write_bundle

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CHECK_NAMES = ("dims", "prop35", "centralizer", "generation", "lemma51", "blockdiag")
COMMAND_CAPS = {"build": (1, 6), "verify": (1, 6), "decompose": (3, 5), "export": (3, 5)}
BLOCKDIAG_RANGE = (3, 5)


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    m: int
    checks: tuple[str, ...] = ()
    output_dir: Optional[str] = None
    thread_count: int = 1
    format: str = "csv"


def parse_checks(values: Optional[Sequence[str]], m: int) -> tuple[str, ...]:
    """Expand repeated or comma-separated ``--check`` values, in canonical order."""
    names = set()
    for v in values or ["all"]:
        names.update(s.strip() for s in v.split(",") if s.strip())
    unknown = sorted(names - set(CHECK_NAMES) - {"all"})
    if unknown:
        raise UsageError(f"unknown check(s) {', '.join(unknown)}; choose from {', '.join(CHECK_NAMES)}, all")
    lo, hi = BLOCKDIAG_RANGE
    if "all" in names:
        names |= set(CHECK_NAMES)
        if not lo <= m <= hi:
            names.discard("blockdiag")
    elif "blockdiag" in names and not lo <= m <= hi:
        raise UsageError(f"blockdiag needs {lo} <= m <= {hi}, got m={m}")
    return tuple(c for c in CHECK_NAMES if c in names)


def resolve_threads(flag: Optional[int], env: Optional[str]) -> int:
    """The CLI flag wins; otherwise OTW_THREADS; otherwise one thread."""
    if flag is not None:
        value, source = flag, "--threads"
    elif env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"OTW_THREADS must be an integer, got {env!r}") from None
        source = "OTW_THREADS"
    else:
        return 1
    if value < 1:
        raise UsageError(f"{source} must be at least 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="otw", description="Exact Terwilliger algebra computations for the Odd graph O_(m+1).")
    p.add_argument("command", choices=tuple(COMMAND_CAPS))
    p.add_argument("-m", type=int, required=True, help="vertices are m-subsets of {1..2m+1}")
    p.add_argument("--check", action="append", metavar="NAMES",
                   help=f"comma-separated subset of {','.join(CHECK_NAMES)},all (verify only; default all)")
    p.add_argument("--out", metavar="DIR", help="export directory (default otw-m<m>)")
    p.add_argument("--format", choices=("json", "csv"), default="csv", help="format of the flat export tables")
    p.add_argument("--threads", type=int, help="worker threads (default: OTW_THREADS or 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def make_config(args: argparse.Namespace, env: Optional[dict] = None) -> RunConfig:
    env = os.environ if env is None else env
    lo, hi = COMMAND_CAPS[args.command]
    if not lo <= args.m <= hi:
        raise UsageError(f"{args.command} needs {lo} <= m <= {hi}, got m={args.m}")
    if args.check and args.command != "verify":
        raise UsageError("--check only applies to verify")
    checks = parse_checks(args.check, args.m) if args.command == "verify" else ()
    threads = resolve_threads(args.threads, env.get("OTW_THREADS"))
    out = args.out or f"otw-m{args.m}"
    return RunConfig(args.command, args.m, checks, out, threads, args.format)


# -- commands ------------------------------------------------------------------

def _describe(rep: CheckReport) -> str:
    s = rep.summary
    if not rep.passed:
        return f"first failure: {rep.failures[0]}"
    if rep.name == "dims":
        return f"dim T = {s['dimension']}"
    if rep.name == "generation":
        return f"generated dimension {s['dimension']}"
    if rep.name == "blockdiag":
        sizes = ",".join(map(str, s["block_sizes"]))
        mults = ",".join(map(str, s["multiplicities"]))
        return f"block sizes ({sizes}), multiplicities ({mults}), center dimension {s['center_dimension']}"
    return f"{len(rep.items)} identities"


def _check_runners(alg: OddGraphAlgebra, threads: int) -> dict[str, Callable[[], CheckReport]]:
    return {
        "dims": lambda: verify_dimensions(alg.types, alg.m, strict=False),
        "prop35": lambda: verify_generator_identities(alg.orbit_basis, alg.dual, alg.distance_matrices, strict=False),
        "centralizer": lambda: verify_centralizer(alg.orbit_basis, strict=False),
        "generation": lambda: verify_generation(alg.orbit_basis, alg.structure_constants, strict=False),
        "lemma51": lambda: verify_path_products(alg.orbit_basis, alg.dual, alg.distance_matrices, strict=False),
        "blockdiag": lambda: verify_decomposition(alg, threads=threads, strict=False)[1],
    }


def _timed(fn: Callable[[], CheckReport], name: str) -> tuple[CheckReport, float]:
    t0 = time.perf_counter()
    try:
        rep = fn()
    except (VerificationError, ArithmeticError, RuntimeError) as e:
        rep = CheckReport(name)
        rep.record(f"{type(e).__name__}: {e}", False)
    return rep, time.perf_counter() - t0


def run_verify(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    alg = OddGraphAlgebra(cfg.m)
    # Shared pieces are built once up front so concurrent checks only read them.
    alg.orbit_basis, alg.dual, alg.spectral
    if {"generation", "blockdiag"} & set(cfg.checks):
        alg.structure_constants
    runners = _check_runners(alg, cfg.thread_count)
    jobs = [(name, runners[name]) for name in cfg.checks]
    if cfg.thread_count > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.thread_count) as pool:
            results = list(pool.map(lambda job: _timed(job[1], job[0]), jobs))
    else:
        results = [_timed(fn, name) for name, fn in jobs]
    print(f"otw verify m={cfg.m}", file=out)
    for (name, _), (rep, secs) in zip(jobs, results):
        status = "PASS" if rep.passed else "FAIL"
        print(f"  {status}  {name:<12} {secs:8.2f} s  {_describe(rep)}", file=out)
    failed = [name for (name, _), (rep, _) in zip(jobs, results) if not rep.passed]
    print("all checks passed" if not failed else f"failed: {', '.join(failed)}", file=out)
    return EXIT_FAIL if failed else EXIT_OK


def run_build(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    t0 = time.perf_counter()
    alg = OddGraphAlgebra(cfg.m)
    sd = alg.spectral
    st = alg.structure_constants
    nnz = sum(len(row) for _, _, row in st.items())
    print(f"otw build m={cfg.m}", file=out)
    print(f"  vertices          {alg.ctx.vertex_count}", file=out)
    print(f"  sphere sizes      {list(alg.distance_matrices.sphere_sizes)}", file=out)
    print(f"  basis elements    {len(alg.types)}", file=out)
    print(f"  eigenvalues       {list(sd.ordered_eigenvalues)}", file=out)
    print(f"  multiplicities    {[sd.multiplicity(k) for k in range(cfg.m + 1)]}", file=out)
    print(f"  structure consts  {nnz} nonzero", file=out)
    print(f"  time              {time.perf_counter() - t0:.2f} s", file=out)
    return EXIT_OK


def run_decompose(cfg: RunConfig, out=None):
    out = out or sys.stdout
    alg = OddGraphAlgebra(cfg.m)
    t0 = time.perf_counter()
    dec, rep = verify_decomposition(alg, threads=cfg.thread_count, strict=False)
    print(f"otw decompose m={cfg.m}", file=out)
    if dec is not None:
        print("     mu   d  block_dim  multiplicity", file=out)
        for mu, d, mult, size in dec.report.rows:
            print(f"  {mu:5d} {d:3d} {size:10d} {mult:13d}", file=out)
        print(f"  center dimension {dec.report.center_dimension}", file=out)
    status = "PASS" if rep.passed else "FAIL"
    print(f"  {status}  blockdiag {time.perf_counter() - t0:8.2f} s  {_describe(rep)}", file=out)
    return alg, dec, rep


def run_export(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    alg, dec, rep = run_decompose(cfg, out)
    if not rep.passed:
        print("not exporting: decomposition checks failed", file=out)
        return EXIT_FAIL
    paths = write_bundle(collect_bundle(alg, dec), cfg.output_dir, cfg.format)
    print(f"wrote {len(paths)} files to {cfg.output_dir}", file=out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"otw: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if cfg.command == "build":
            return run_build(cfg)
        if cfg.command == "verify":
            return run_verify(cfg)
        if cfg.command == "decompose":
            return EXIT_OK if run_decompose(cfg)[2].passed else EXIT_FAIL
        return run_export(cfg)
    except ExportError as e:
        print(f"otw: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
