"""
Wavefunctions of the linear-mass well
=====================================

The n = 4 state from the Airy solution and from the extended WKB form
``sqrt(m*/k) sin(theta)``.  With V = 0 the oscillation amplitude of |psi|^2
follows sqrt(m*(x)): the heavy side carries the larger lobes.
"""
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from pdem import exact, linear_well, semiclassical

well = linear_well(0.1, 0.2, 5.0)
n = 4

ex = exact.linear_well_exact_wavefunction(0.1, 0.2, 5.0, n, points=4001)
wk = semiclassical.wkb_state(well, n, points=4001)
x = ex.grid

gap = np.abs(ex.values - wk.values).max() / np.abs(ex.values).max()
print(f"E_exact = {ex.energy:.6f} eV, E_wkb = {wk.energy:.6f} eV")
print(f"max |psi_wkb - psi_exact| / peak = {gap:.4f}")

###############################################################################
# Fit c*sqrt(m*) through the peaks of |psi|^2.

fit = semiclassical.envelope_fit(ex, well)
print(f"envelope fit through {fit.peak_x.size} peaks, relative residual {fit.residual:.1e}")

fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
top.plot(x, ex.values.real, label="exact")
top.plot(x, wk.values.real, "--", label="WKB")
top.set_ylabel(r"$\psi$")
top.legend()
bottom.plot(x, np.abs(ex.values) ** 2, label=r"$|\psi|^2$")
bottom.plot(x, fit(well, wk.grid), ":", label=r"$c\sqrt{m^*}$")
bottom.plot(fit.peak_x, fit.peak_height, "k.")
bottom.set_xlabel("x (nm)")
bottom.legend()
fig.tight_layout()
fig.savefig("wavefunctions_n4.png", dpi=120)
