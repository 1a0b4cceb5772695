"""
Finite well with a mass discontinuity
=====================================

A GaAs-like well (m* = 0.067, 10 nm) between AlGaAs-like barriers
(m* = 0.092, V = 0.3 eV).  The piecewise WKB rule matches the two plane-wave
amplitudes at the interfaces with flux-weighted BenDaniel-Duke conditions.
"""
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from pdem import semiclassical, tmm
from pdem.core import HardWall, PiecewiseConstant, Problem

L, pad = 10.0, 15.0
mass = PiecewiseConstant((0.0, L), (0.092, 0.067, 0.092))
pot = PiecewiseConstant((0.0, L), (0.3, 0.0, 0.3))
well = Problem(-pad, L + pad, mass, pot, HardWall())

# hard walls far out in the barriers stand in for the open boundary
states = semiclassical.piecewise_wkb_bound_states(well, 0.0, L, (0.001, 0.299))
numeric = tmm.find_eigenvalues(well, 0.001, 0.299, N=4000, scan_points=600)
for (n, E_t), E in zip(numeric, states):
    print(f"n = {n}: piecewise WKB {E:.6f} eV, slabs {E_t:.6f} eV")

fig, ax = plt.subplots(figsize=(5, 3.5))
xs = np.linspace(-8, L + 8, 1200)
ax.plot(xs, well.V(xs), "k", lw=0.8)
for E in states:
    wf = semiclassical.piecewise_wkb_wavefunction(well, E, 0.0, L, points=1200)
    psi = np.interp(xs, wf.grid, wf.values.real)
    ax.plot(xs, E + 0.03 * psi / np.abs(psi).max())
ax.set_xlabel("x (nm)")
ax.set_ylabel("E (eV)")
fig.tight_layout()
fig.savefig("finite_well.png", dpi=120)
