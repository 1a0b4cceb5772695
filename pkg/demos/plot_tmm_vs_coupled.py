"""
Slabs and their continuum limit
===============================

The transfer-matrix engine cuts the well into N uniform slabs.  Letting the
slab width go to zero gives a first-order system for the wave amplitudes,
integrated here with fixed-step RK4.  Both reproduce the Airy levels; the
slab error falls as 1/N^2.
"""
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from pdem import coupled, exact, linear_well, tmm
from pdem.numerics import log_slope

well = linear_well(0.1, 0.2, 5.0)
ref = np.array([E for _, E in exact.linear_well_exact_spectrum(0.1, 0.2, 5.0, 6, tol=1e-13).levels])

Ns = [250, 1000, 4000, 16000]
errors = []
for N in Ns:
    levels = tmm.find_eigenvalues(well, 0.001, 1.0, N=N, scan_points=400, tol=1e-13)
    errors.append(np.abs(np.array([E for _, E in levels]) - ref).max())
    print(f"N = {N:5d}: max level error {errors[-1]:.2e} eV")
print(f"convergence order {-log_slope(Ns, errors):.2f}")

###############################################################################
# The coupled amplitudes give the same spectrum from an ODE rather than a
# matrix product.

levels = coupled.find_eigenvalues(well, 0.001, 1.0, steps=2000, scan_points=400, tol=1e-12)
dev = np.abs(np.array([E for _, E in levels]) - ref).max()
print(f"coupled ODE, 2000 RK4 steps: max level error {dev:.2e} eV")

###############################################################################
# Near-identity check: one interface matrix is I + Gamma dx up to O(dx^2).

dxs = np.logspace(-4, -1, 7)
dev = [coupled.first_order_consistency(well, 0.4, 0.3, dx) for dx in dxs]
print(f"|T - I - Gamma dx| slope {log_slope(dxs, dev):.3f}")

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.loglog(Ns, errors, "o-")
ax.set_xlabel("slabs N")
ax.set_ylabel("max level error (eV)")
fig.tight_layout()
fig.savefig("tmm_convergence.png", dpi=120)
