"""Compare the three parameter quantization schemes on prose-like text.

Scheme 0 uses one level count everywhere, scheme 1 scales it to the average
state population, scheme 2 gives rarely visited states a coarse grid.
"""

from ptpmdl import compress
from ptpmdl.bitio import bytes_to_bits
from ptpmdl.sources import synthetic_text

bits = bytes_to_bits(synthetic_text(2**17, seed=0))
n_bytes = bits.size // 8
print(f"{'B':>5} " + " ".join(f"{'gamma s' + str(s):>10}" for s in range(3)) + "  gain s2 vs s0")
for B in (1, 10, 100, 1000):
    sizes = [len(compress(bits, B, scheme=s).to_bytes()) for s in range(3)]
    gammas = [8 * n / n_bytes for n in sizes]
    gain = 100 * (sizes[0] - sizes[2]) / sizes[0]
    print(f"{B:5d} " + " ".join(f"{g:10.4f}" for g in gammas) + f"  {gain:6.2f}%")
