"""
Tunnelling through barriers
===========================

Transmission from the slab product against the rectangular-barrier formula,
and the WKB estimate ``exp(-2 * integral kappa dx)`` for a smooth barrier.
"""
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from pdem import semiclassical, tmm
from pdem.core import Constant, Lead, Problem, Scattering, Tabulated

m, V0, w = 0.067, 0.3, 2.0
barrier = Problem(0, w, Constant(m), Constant(V0), Scattering(Lead(m), Lead(m)))
E = np.linspace(0.005, 0.6, 240)
T = np.array([tmm.transmission(barrier, e, 200)[0] for e in E])


def rectangular(E):
    k = np.sqrt(m * E / 0.0380998 + 0j)
    q = np.sqrt(m * (E - V0) / 0.0380998 + 0j)
    s = np.sin(q * w)
    return (1 / (1 + (k**2 - q**2) ** 2 * s * np.conj(s) / (4 * k**2 * q * np.conj(q)))).real


print(f"rectangular barrier: max |T_tmm - T_formula| = {np.abs(T - rectangular(E)).max():.1e}")

###############################################################################
# A smooth sin^2 barrier, 6 nm wide.  WKB drops the reflection prefactor,
# which for smooth barriers stays of order one.

x = np.linspace(0, 6, 601)
smooth = Problem(0, 6, Constant(0.5), Tabulated(x, 0.5 * np.sin(np.pi * x / 6) ** 2),
                 Scattering(Lead(0.5), Lead(0.5)))
for e in (0.05, 0.1, 0.2, 0.3):
    t_num = tmm.transmission(smooth, e, 3000)[0]
    t_wkb = semiclassical.wkb_transmission(smooth, e)
    print(f"E = {e:.2f} eV: T_tmm = {t_num:.3e}, T_wkb = {t_wkb:.3e}, ratio {t_wkb / t_num:.2f}")

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.semilogy(E, T, label="slabs")
ax.semilogy(E, rectangular(E), "--", label="closed form")
ax.axvline(V0, color="0.6", lw=0.8)
ax.set_xlabel("E (eV)")
ax.set_ylabel("T")
ax.legend()
fig.tight_layout()
fig.savefig("tunneling.png", dpi=120)
