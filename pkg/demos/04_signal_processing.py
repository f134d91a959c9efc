"""Phase sequences beyond the walk: shorter reflections and a partition oracle on ions.

Run: python demos/04_signal_processing.py
"""

from math import comb

import numpy as np

from qwalkrot import ions, qsp

# The walk phases realise 2x^(2N) - 1; a fitted sequence of the same length is much sharper.
target = qsp.target_poly_ab(0.62, 0.3)
seq = qsp.find_phases(target, 10)
print("fitted phases:", np.round(seq.phases, 4))
lam = np.sqrt(np.arange(7))
mult = [comb(6, j) for j in range(7)]
print(f"six qubits, ten segments: F = {qsp.qsp_reflection_fidelity(seq, lam, mult, 0.88):.5f} (fitted), "
      f"{qsp.qsp_reflection_fidelity(qsp.walk_phases(5), lam, mult, 0.88):.5f} (walk)")

# Balanced partitions of {1, 2, 3}: the oracle keeps +1 exactly on the balanced sign patterns.
for mech in ("walk", "qsp"):
    rep = ions.partition_oracle([1, 2, 3], mech)
    print(f"{mech:4s}: {rep.steps:3d} entangler steps, F = {rep.F:.9f}, balanced {rep.to_dict()['balanced_states']}")
rep = ions.partition_oracle([1, 2, 4])
print(f"{{1, 2, 4}} has no balanced split; oracle is {rep.oracle.data[0, 0].real:+.3f} * I")

# Rydberg atoms: the same walk with the interaction as the entangler.
res = ions.rydberg_reflection([1.0, 1.0], np.pi / 8, 3)
print(f"Rydberg pair, zero-sum subspace of dimension {res.subspace_dim}: F = {res.F:.6f}")
