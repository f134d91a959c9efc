"""The resonant hide-and-flip baseline on a qutrit chain, and the cost comparison.

Run: python demos/05_baseline_costs.py
"""

import numpy as np

from qwalkrot import fsbsw

for n in (3, 4, 5, 6):
    u = fsbsw.simulate_fsbsw(n)
    diag, off = fsbsw.computational_diagonal(u, n)
    flipped = [format(i, f"0{n}b") for i in np.nonzero(diag.real < 0)[0]]
    duration = fsbsw.sequence_duration(fsbsw.build_fsbsw_sequence(n))
    print(f"n = {n}: {duration} pi/g, flips {flipped}, off-diagonal leak {off:.1e}")

print()
for row in fsbsw.cost_comparison(4, 5):
    print(f"{row.method:13s} two-qubit time {row.two_qubit_time_cz!s:>5} CZ   "
          f"single-qubit {row.single_qubit_count if row.single_qubit_count is not None else 'n/a'}")
