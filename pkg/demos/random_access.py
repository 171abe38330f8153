"""Write a multi-block file and pull single blocks out of it.

Only the header, model, offset table and the requested payload are read.
"""

import os
import tempfile

import numpy as np

from ptpmdl import compress, decompress, decompress_block, four_state_spec, generate

bits = generate(four_state_spec(2**20, 0))
r = compress(bits, blocks=32, depth=3)
path = os.path.join(tempfile.mkdtemp(), "four.ptpm")
with open(path, "wb") as f:
    f.write(r.to_bytes())
size = os.path.getsize(path)
print(f"{bits.size} bits -> {size} bytes in {r.plan.blocks} blocks")

full = decompress(open(path, "rb").read())
for b in (1, 17, 32):
    lo, hi = r.plan.bounds(b - 1)
    part = decompress_block(path, b)
    c = r.container
    touched = c.header_bytes() + c.model_bytes + (c.payload_bits[b - 1] + 7) // 8
    print(f"block {b:2d}: bits [{lo}, {hi})  matches={np.array_equal(part, full[lo:hi])}  "
          f"bytes read={touched} of {size}")
