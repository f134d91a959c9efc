"""Rotating the dark subspace of an arbitrary matrix with the interleaved sequence.

Run: python demos/02_subspace_rotation.py
"""

import numpy as np

from qwalkrot import cqed, embedding
from qwalkrot.linalg import average_gate_fidelity

rng = np.random.default_rng(7)
a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
a[:, :2] = 0  # two dark directions
a /= np.linalg.norm(a, 2)
sys = embedding.embed(a)
print("singular values:", np.round(sys.blocks.singular_values, 3))

t, k = np.pi / 2, 0.25
for N in (1, 3, 5, 9, 15):
    w = embedding.rotation_sequence(sys, t, k, N)
    f = average_gate_fidelity(embedding.ancilla_block(w, 1), embedding.ideal_rotation(sys, k, N))
    print(f"N = {N:2d}: F = {f:.6f}")

# Four qubits on a central ancilla: the multi-controlled phase in the rotating-wave model.
print("\nstar of four qubits, t = 0.333 pi / g")
for label, g in (("homogeneous", [1.0] * 4), ("inhomogeneous", [0.85, 0.99, 0.91, 1.02])):
    g = np.asarray(g)
    fs = [cqed.simulate_rwa_sequence(g, N, 0.0, 0.333 * np.pi / g.max()).F for N in (3, 5, 7)]
    print(f"{label:14s} " + "  ".join(f"N={N}: {f:.4f}" for N, f in zip((3, 5, 7), fs)))

# Away from k = 0 the same sequence gives a general phase on the all-zero state.
ks = np.linspace(0, 2 * np.pi / 3, 7)
print("\nk      F (closed form, N = 3)")
for k in ks:
    print(f"{k:.3f}  {cqed.closed_form_rotation_fidelity(k, 0.333 * np.pi)[1]:.5f}")
