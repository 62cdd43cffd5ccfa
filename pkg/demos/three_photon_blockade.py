"""
Three-photon blockade with opposite couplings.

Near delta_p = -sqrt(6) g / 2 the pump drives two photons at once, while
the third is blocked: g2 > 1 together with g3 < 1. A control field
widens the detuning window where this happens.
"""
import math

import numpy as np

from cavityblockade import presets, sweep

g = presets.G
target = -math.sqrt(6) * g / 2
for omega_c in (0.0, 8.0):
    base = presets.fig4_base(omega_c=omega_c, fock_cutoff=8)
    spec = sweep.SweepSpec(base, "delta_p", -40.0, -10.0, 61)
    rows = sweep.run_sweep(spec)
    window = [r.axis_value for r in rows if r.g2 > 1 and r.g3 < 1]
    print(f"omega_c = {omega_c:g}: g2 > 1 and g3 < 1 at delta_p in", np.round(window, 2).tolist())

print(f"two-photon resonance at delta_p = {target:.3f}")
