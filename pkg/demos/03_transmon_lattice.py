"""Transmons with finite anharmonicity: leakage, the best rotation angle, and probe traces.

Run: python demos/03_transmon_lattice.py  (takes a few seconds)
"""

import warnings

import numpy as np

from qwalkrot import cqed

warnings.simplefilter("ignore", cqed.WeakAnharmonicityWarning)
preset = cqed.load_preset("table4")

print("g/2pi [MHz]  N   F       phi*    leakage")
for g in preset["g_mhz"]:
    spec = cqed.lattice_from_preset(preset, g)
    for N in preset["N_values"]:
        rep = cqed.simulate_full_sequence(spec, N, cqed.gate_time_ns(g))
        print(f"{g:10.0f}  {N}   {rep.F:.4f}  {rep.phi_star:.3f}   {rep.metadata['leakage']:.2e}")

# Return probabilities over one CZ time at the strongest coupling.
spec = cqed.lattice_from_preset(preset, 9.0)
t_max = np.pi / (cqed.TWO_PI * 9e-3)
times, traces = cqed.probe_initial_states(spec, ["10000", "11000", "11110"], t_max, 9)
print("\nt [ns]  " + "  ".join(traces))
for i, t in enumerate(times):
    print(f"{t:6.1f}  " + "  ".join(f"{traces[lab][i]:.3f}" for lab in traces))
