"""
Rotating-frame Hamiltonian and dissipation channels of the two-atom
ladder system.

All rates and detunings are in units of the cavity decay rate and
``hbar = 1``. The Hamiltonian is

    H = sum_j (D_m S^j_mm + D_e S^j_ee) + D_cav a^dag a
        + sum_j (g_j a S^j_mg + W_p S^j_mg + W_c S^j_em + h.c.)

with ``D_m = D_cav = delta_p`` (cavity resonant with g-m) and
``D_e = delta_p + delta_c``. Rabi frequencies enter without a factor 1/2.
"""
import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import hilbert
from .hilbert import HilbertSpace, annihilation, atomic_operator, dag, scale

PARAM_FIELDS = ("g1", "g2", "omega_p", "omega_c", "delta_p", "delta_c",
                "kappa", "gamma_m", "gamma_e", "fock_cutoff", "cavity_offset")

# Fields that carry a rate or frequency; common rescaling leaves the
# steady state unchanged.
RATE_FIELDS = ("g1", "g2", "omega_p", "omega_c", "delta_p", "delta_c",
               "kappa", "gamma_m", "gamma_e", "cavity_offset")


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters in units of kappa plus the photon cutoff.

    ``cavity_offset`` shifts the cavity detuning away from ``delta_p``; it
    is a diagnostic knob and stays 0 in every figure preset.
    """

    g1: float = 0.0
    g2: float = 0.0
    omega_p: float = 0.0
    omega_c: float = 0.0
    delta_p: float = 0.0
    delta_c: float = 0.0
    kappa: float = 1.0
    gamma_m: float = 1.0
    gamma_e: float = 0.01
    fock_cutoff: int = 6
    cavity_offset: float = 0.0

    def __post_init__(self):
        for name in RATE_FIELDS:
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.integer, np.floating)) or isinstance(value, bool):
                raise TypeError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.gamma_m < 0 or self.gamma_e < 0:
            raise ValueError("atomic decay rates must be >= 0")
        if isinstance(self.fock_cutoff, bool) or int(self.fock_cutoff) != self.fock_cutoff:
            raise TypeError(f"fock_cutoff must be an integer, got {self.fock_cutoff!r}")
        if self.fock_cutoff < 2:
            raise ValueError(f"fock_cutoff must be >= 2, got {self.fock_cutoff}")
        object.__setattr__(self, "fock_cutoff", int(self.fock_cutoff))

    @property
    def delta_cav(self) -> float:
        return self.delta_p + self.cavity_offset

    @property
    def delta_m(self) -> float:
        return self.delta_p

    @property
    def delta_e(self) -> float:
        return self.delta_p + self.delta_c

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace(self.fock_cutoff)

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def scaled(self, factor: float) -> "ModelParams":
        """Multiply every rate and detuning by ``factor``."""
        return self.replace(**{k: getattr(self, k) * factor for k in RATE_FIELDS})

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _check_space(params, space):
    if space is None:
        return params.space
    if space.fock_cutoff != params.fock_cutoff:
        raise ValueError(f"space cutoff {space.fock_cutoff} != params cutoff {params.fock_cutoff}")
    return space


def hamiltonian_terms(space: HilbertSpace) -> dict:
    """Parameter-free Hermitian pieces of H, keyed by the coefficient they multiply.

    ``H = sum(coef[k] * terms[k])`` with coefficients from :func:`hamiltonian_coefficients`.
    """
    a = annihilation(space)
    n_op = hilbert.mul(dag(a), a)
    S = lambda j, x, y: atomic_operator(space, j, x, y)

    def herm(op):
        return hilbert.add(op, dag(op))

    return {
        "delta_m": hilbert.add(S(1, "m", "m"), S(2, "m", "m")),
        "delta_e": hilbert.add(S(1, "e", "e"), S(2, "e", "e")),
        "delta_cav": n_op,
        "g1": herm(hilbert.mul(a, S(1, "m", "g"))),
        "g2": herm(hilbert.mul(a, S(2, "m", "g"))),
        "omega_p": herm(hilbert.add(S(1, "m", "g"), S(2, "m", "g"))),
        "omega_c": herm(hilbert.add(S(1, "e", "m"), S(2, "e", "m"))),
    }


def hamiltonian_coefficients(params: ModelParams) -> dict:
    return {
        "delta_m": params.delta_m,
        "delta_e": params.delta_e,
        "delta_cav": params.delta_cav,
        "g1": params.g1,
        "g2": params.g2,
        "omega_p": params.omega_p,
        "omega_c": params.omega_c,
    }


def build_hamiltonian(params: ModelParams, space: HilbertSpace = None):
    """Rotating-frame Hamiltonian as a sparse Hermitian matrix."""
    space = _check_space(params, space)
    terms = hamiltonian_terms(space)
    coefs = hamiltonian_coefficients(params)
    H = hilbert.scale(0.0, terms["delta_m"])
    for key, term in terms.items():
        H = H + coefs[key] * term
    return hilbert.canonical(H)


def jump_terms(space: HilbertSpace) -> dict:
    """Unscaled jump operators grouped by the rate that multiplies their dissipator."""
    return {
        "kappa": [annihilation(space)],
        "gamma_e": [atomic_operator(space, j, "m", "e") for j in (1, 2)],
        "gamma_m": [atomic_operator(space, j, "g", "m") for j in (1, 2)],
    }


def collapse_operators(params: ModelParams, space: HilbertSpace = None) -> list:
    """Jump operators ``sqrt(rate) * C`` for cavity leakage and downward atomic decay.

    Order: ``a``, then ``S^1_me, S^2_me`` (e -> m at gamma_e), then
    ``S^1_gm, S^2_gm`` (m -> g at gamma_m). Channels with zero rate are dropped.
    """
    space = _check_space(params, space)
    out = []
    for rate_name, ops in jump_terms(space).items():
        rate = getattr(params, rate_name)
        if rate > 0:
            out.extend(scale(np.sqrt(rate), op) for op in ops)
    return out


def excitation_number(space: HilbertSpace):
    """``a^dag a + sum_j (S^j_mm + S^j_ee)``, conserved by H when ``omega_p = 0``."""
    a = annihilation(space)
    ops = [hilbert.mul(dag(a), a)]
    for j in (1, 2):
        ops += [atomic_operator(space, j, "m", "m"), atomic_operator(space, j, "e", "e")]
    return hilbert.add(*ops)
