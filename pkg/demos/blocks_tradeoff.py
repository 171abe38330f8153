"""Cost of splitting the input into B independently decodable blocks.

The shared model keeps the extra cost near B*(D+2) bits; fitting a model per
block (the naive baseline) pays for B models.
"""

from ptpmdl import bench as bn
from ptpmdl import compress, four_state_spec, generate

N, D = 2**20, 3
bits = generate(four_state_spec(N, 0))
print(f"{'B':>5} {'bytes':>7} {'rho':>8} {'rho naive':>10} {'B(D+2)':>7}")
for B in (1, 4, 16, 64, 256):
    r = compress(bits, B, D)
    rho = bn.pointwise_redundancy(r.container.coded_bits(), N, r.source)
    naive = bn.naive_compress(bits, B, D)
    rho_naive = bn.pointwise_redundancy(naive.coded_bits, N, r.source)
    print(f"{B:5d} {len(r.to_bytes()):7d} {rho:8.1f} {rho_naive:10.1f} {B * (D + 2):7d}")
