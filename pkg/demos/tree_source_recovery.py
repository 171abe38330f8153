"""Sample the four-state tree source and see which model MDL pruning picks.

With 2^20 bits the two deep states ("001", "101") usually merge into "01";
with 2^23 bits they separate.
"""

from ptpmdl import compress, four_state_spec, generate
from ptpmdl.sources import FOUR_STATES

print("true source:", FOUR_STATES)
for exp in (16, 20, 23):
    for seed in range(3):
        r = compress(generate(four_state_spec(2**exp, seed)), blocks=1, depth=3)
        src = r.source
        states = ", ".join(f"{s or '-'}:{p:.3f}" for s, p in zip(src.labels(), src.r))
        print(f"N=2^{exp} seed={seed}  MDL={src.mdl_root:10.1f}  {states}")
