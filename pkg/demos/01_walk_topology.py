"""A single coined walk step, its band structure, and the walk that returns to -I.

Run: python demos/01_walk_topology.py
"""

import numpy as np

from qwalkrot import walk

# The coin angle decides the phase: winding 0 at theta = 0, winding 1 otherwise.
for theta in (0.0, np.pi / 3, 2 * np.pi / 3, np.pi):
    w = walk.winding_number(theta)
    print(f"theta = {theta:5.3f}: winding {w.number}{' (gap closed)' if w.degenerate else ''}")

# Band axis at a few momenta; it stays on the circle perpendicular to the chiral axis.
theta = 2 * np.pi / 3
for k in np.linspace(0.2, np.pi, 4):
    bp = walk.band_point(k, theta)
    print(f"k = {k:4.2f}: E = {bp.energy:.3f}, axis . chiral = {bp.axis @ bp.chiral_axis:+.1e}")

# Sweeping the momentum twice around the zone in 2N steps drives the walk towards -I.
print("\nN   ||W + I||   2|cos(theta/2)|^N")
for N in (1, 3, 5, 7, 9, 11):
    print(f"{N:<3d} {walk.revival_residual(theta, N):.6f}    {walk.revival_bound(theta, N):.6f}")
