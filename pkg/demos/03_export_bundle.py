"""
Exporting block data for an SDP
===============================

The export bundle carries everything needed to rewrite a symmetric
semidefinite program over the algebra as a set of small blocks: the index
table, the representation block of every basis element, the change of basis
and the structure constants.  All numbers are exact strings.
"""
import csv
import sys
import tempfile
from pathlib import Path

from otw.algebra import OddGraphAlgebra
from otw.decomposition import verify_decomposition
from otw.export import collect_bundle, read_bundle, write_bundle

alg = OddGraphAlgebra(3)
dec, _ = verify_decomposition(alg)
bundle = collect_bundle(alg, dec)

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="otw-"))
for path in write_bundle(bundle, out):
    print(f"{path.name:28s} {path.stat().st_size:8d} bytes")

with open(out / "upsilon.csv") as fh:
    for row in csv.reader(fh):
        print("  ", ",".join(row))

# parsing gives back exactly what was written
assert read_bundle(out) == bundle

# the block of one basis element in every component
idx, blocks = bundle.blocks[7]
print(f"type #{idx} = {bundle.tables['types'][idx][1:]}")
for mu, d, entries in blocks:
    print(f"  ({mu}, {d}):", [(r, c, str(v)) for r, c, v in entries])
