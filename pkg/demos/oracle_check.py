"""
Steady state against brute-force time evolution.

The fixed point from the linear solve should match a long integration of
the master equation started from the vacuum.
"""
import numpy as np

from cavityblockade import dynamics, presets
from cavityblockade.observables import photon_stats

p = presets.get_preset("fig2b").representative.replace(fock_cutoff=4)
rho_ss, info = dynamics.solve_model(p, full_output=True)
print(f"steady state via {info.method}: residual {info.residual:.1e}")

times = [5.0, 20.0, 50.0, 100.0]
states = dynamics.evolve_model(p, times[-1], times=times)
ss = photon_stats(rho_ss)
for t, rho in zip(times, states):
    st = photon_stats(rho)
    print(f"t = {t:5.0f}: <n> = {st.mean_n:.10f}  g2 = {st.g2:.8f}  "
          f"max |rho - rho_ss| = {np.abs(rho - rho_ss).max():.1e}")
print(f"steady : <n> = {ss.mean_n:.10f}  g2 = {ss.g2:.8f}")
