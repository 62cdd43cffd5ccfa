"""
Pump-detuning spectrum with weak driving (equal couplings).

The cavity lights up where the pump hits a one-photon dressed state. The
anharmonic ladder then makes the second photon off-resonant, so those
peaks carry antibunched light (g2 < 1). A control field splits the left
peak.
"""
import math

from cavityblockade import presets, sweep
from cavityblockade.observables import peak_structure

g = presets.G
for omega_c in (0.0, 5.0):
    base = presets.fig2_base(omega_c=omega_c, fock_cutoff=4)
    spec = sweep.SweepSpec(base, "delta_p", -60.0, 60.0, 121)
    rows = sweep.run_sweep(spec)
    at = {r.axis_value: r for r in rows}
    print(f"omega_c = {omega_c:g}:")
    for x, n in peak_structure(rows):
        print(f"  peak at delta_p = {x:6.1f}  <n> = {n:.3e}  g2 = {at[x].g2:.3f}")

print("expected single-excitation resonances at +-", round(math.sqrt(2) * g, 2))
