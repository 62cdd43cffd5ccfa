"""
Parameter sets behind the figure reproductions.

All presets share ``kappa = 1``, ``gamma_m = 1``, ``gamma_e = 0.01`` and
``g = 20``. Where the sign of the control detuning is ambiguous (figs. 2
and 4), both signs are run as separate variants with a ``dcplus`` /
``dcminus`` suffix. Fig. 3 and fig. 5 use the positive sign, which is the
one that produces the split low-frequency features in figs. 2 and 4.

Cutoffs were chosen with :func:`cavityblockade.sweep.converge_cutoff`
(relative tolerance 1e-6) at the brightest point of each preset. Each
preset also names one representative point, at its own converged cutoff,
used for cross-checking the steady-state solver against time evolution.
Representative points avoid dark-resonance regions where the slow
``e``-level decay keeps the transient alive well past ``t = 100``.
"""
import math
from dataclasses import dataclass

from .model import ModelParams
from .sweep import SweepSpec

G = 20.0
SPECTRUM_RANGE = (-60.0, 60.0, 241)
GATEWAY_RANGE = (0.0, 20.0, 101)

# Converged cutoffs per figure family.
CUTOFFS = {"fig2": 6, "fig3": 6, "fig4": 14, "fig5": 14}


@dataclass(frozen=True)
class Variant:
    name: str
    spec: SweepSpec


@dataclass(frozen=True)
class FigurePreset:
    preset_id: str
    description: str
    variants: tuple
    representative: ModelParams

    def variant(self, name: str) -> Variant:
        for v in self.variants:
            if v.name == name:
                return v
        raise KeyError(f"{self.preset_id} has no variant {name!r}")


def _sign_name(sign):
    return "dcplus" if sign > 0 else "dcminus"


def fig2_base(**changes) -> ModelParams:
    base = dict(g1=G, g2=G, omega_p=0.2, delta_c=math.sqrt(2) * G,
                gamma_m=1.0, gamma_e=0.01, fock_cutoff=CUTOFFS["fig2"])
    base.update(changes)
    return ModelParams(**base)


def fig4_base(**changes) -> ModelParams:
    base = dict(g1=G, g2=-G, omega_p=2.0, delta_c=math.sqrt(6) * G / 2,
                gamma_m=1.0, gamma_e=0.01, fock_cutoff=CUTOFFS["fig4"])
    base.update(changes)
    return ModelParams(**base)


def spectrum_spec(base: ModelParams, points: int = SPECTRUM_RANGE[2]) -> SweepSpec:
    return SweepSpec(base, "delta_p", SPECTRUM_RANGE[0], SPECTRUM_RANGE[1], points)


def gateway_spec(base: ModelParams, points: int = GATEWAY_RANGE[2]) -> SweepSpec:
    return SweepSpec(base, "omega_c", GATEWAY_RANGE[0], GATEWAY_RANGE[1], points)


def _fig2(pid):
    variants = []
    for omega_c in (0.0, 5.0):
        for sign in (1, -1):
            base = fig2_base(omega_c=omega_c, delta_c=sign * math.sqrt(2) * G)
            variants.append(Variant(f"omegac{omega_c:g}_{_sign_name(sign)}", spectrum_spec(base)))
    panel = "mean photon number" if pid == "fig2b" else "g2(0)"
    return FigurePreset(pid, f"equal couplings, pump-detuning spectrum ({panel})", tuple(variants),
                        fig2_base(delta_p=-math.sqrt(2) * G))


def _fig3(pid, delta_p):
    base = fig2_base(omega_p=1.5, delta_p=delta_p, fock_cutoff=CUTOFFS["fig3"])
    return FigurePreset(pid, f"equal couplings, control-field gateway at delta_p={delta_p:g}",
                        (Variant("dcplus", gateway_spec(base)),), base.replace(omega_c=10.0))


def _fig4(pid, omega_c, rep_delta_p, rep_cutoff):
    variants = []
    for sign in (1, -1):
        base = fig4_base(omega_c=omega_c, delta_c=sign * math.sqrt(6) * G / 2)
        variants.append(Variant(_sign_name(sign), spectrum_spec(base)))
    return FigurePreset(pid, f"opposite couplings, pump-detuning spectrum at omega_c={omega_c:g}",
                        tuple(variants),
                        fig4_base(omega_c=omega_c, delta_p=rep_delta_p, fock_cutoff=rep_cutoff))


def _fig5(pid, delta_p, rep_omega_c, rep_cutoff):
    base = fig4_base(delta_p=delta_p, fock_cutoff=CUTOFFS["fig5"])
    return FigurePreset(pid, f"opposite couplings, control-field gateway at delta_p={delta_p:g}",
                        (Variant("dcplus", gateway_spec(base)),),
                        base.replace(omega_c=rep_omega_c, fock_cutoff=rep_cutoff))


PRESETS = {
    p.preset_id: p for p in (
        _fig2("fig2b"),
        _fig2("fig2c"),
        _fig3("fig3a", -10.0),
        _fig3("fig3b", -20.0),
        _fig3("fig3c", -40.0),
        _fig4("fig4b", 0.0, -math.sqrt(6) * G / 2, 6),
        _fig4("fig4c", 8.0, -29.0, 6),
        _fig5("fig5a", -30.0, 10.0, 6),
        _fig5("fig5b", 0.0, 0.0, 14),
        _fig5("fig5c", -5.0, 10.0, 8),
    )
}


def get_preset(preset_id: str) -> FigurePreset:
    try:
        return PRESETS[preset_id]
    except KeyError:
        raise KeyError(f"unknown preset {preset_id!r}; choose from {sorted(PRESETS)}") from None
