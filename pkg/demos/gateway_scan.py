"""
Control field as a photon gateway.

Fix the pump detuning and raise the control Rabi frequency. With equal
couplings at delta_p = -20 the light goes from bunched to antibunched. With
opposite couplings at delta_p = 0 the cavity is bright and bunched at first
and then goes dark.
"""
from cavityblockade import presets, sweep

cases = {
    "equal couplings, delta_p = -20": presets.get_preset("fig3b").variants[0].spec,
    "opposite couplings, delta_p = 0": presets.get_preset("fig5b").variants[0].spec,
}
for title, full in cases.items():
    # a coarser grid and a smaller cutoff keep the demo quick
    base = full.base.replace(fock_cutoff=min(full.base.fock_cutoff, 8))
    spec = sweep.SweepSpec(base, full.axis, full.start, full.stop, 11)
    print(f"== {title} (N_c = {base.fock_cutoff})")
    print(f"{'omega_c':>8} {'<n>':>11} {'g2':>9} {'g3':>9}")
    for r in sweep.run_sweep(spec):
        fmt = lambda v: f"{v:9.3f}" if v is not None else f"{'-':>9}"
        print(f"{r.axis_value:8.1f} {r.mean_n:11.3e} {fmt(r.g2)} {fmt(r.g3)}")
