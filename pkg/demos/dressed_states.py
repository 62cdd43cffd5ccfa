"""
Dressed states of two atoms sharing one cavity mode.

Switch the pump off and diagonalise the Hamiltonian one excitation
manifold at a time. With equal couplings the cavity sees a collective
(symmetric) atom, so the splittings grow as sqrt(2) g and sqrt(6) g.
With opposite couplings the symmetric state decouples.
"""
import math

from cavityblockade.model import ModelParams
from cavityblockade.observables import manifold_spectrum

g = 20.0

for g2, title in ((g, "equal couplings"), (-g, "opposite couplings")):
    print(f"== {title}: g1 = {g:g}, g2 = {g2:g}")
    p = ModelParams(g1=g, g2=g2, fock_cutoff=4)
    for n_exc in (1, 2):
        spec = manifold_spectrum(p, n_exc)
        print(f"  n_exc = {n_exc}: cavity-coupled eigenvalues", spec.coupled_eigenvalues.round(4))
        for k in range(spec.eigenvalues.size):
            if not spec.cavity_coupled[k]:
                continue
            weights = {lab: w for lab, w in spec.label_overlaps(k).items() if w > 1e-9}
            print(f"    {spec.eigenvalues[k]:9.4f}", {lab: round(w, 4) for lab, w in weights.items()})

print("sqrt(2) g =", round(math.sqrt(2) * g, 4), " sqrt(6) g =", round(math.sqrt(6) * g, 4))

# A control field on m <-> e adds the E-type collective states to the ladder.
spec = manifold_spectrum(ModelParams(g1=g, g2=g, omega_c=5.0, delta_c=math.sqrt(2) * g), 1)
print("with omega_c = 5:", spec.coupled_eigenvalues.round(3))
