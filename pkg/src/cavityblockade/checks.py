"""
Quick invariant checks run by ``cavityblockade selfcheck``.

Each check returns a :class:`CheckResult`; none of them raise on failure.
The Liouvillian builder is injectable so a deliberately broken generator
can be shown to trip the trace check.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import dynamics, model, observables, output, presets, sweep


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_hermitian(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return x + x.conj().T


def check_trace_preservation(build=dynamics.build_liouvillian, params=None, samples=10, seed=7):
    params = params or presets.fig2_base(omega_c=5.0, delta_p=-20.0)
    L = build(model.build_hamiltonian(params), model.collapse_operators(params))
    rng = np.random.default_rng(seed)
    d = params.space.total_dim
    worst_tr = worst_herm = 0.0
    for _ in range(samples):
        X = _random_hermitian(rng, d)
        Y = dynamics.apply_liouvillian(L, X)
        norm = np.linalg.norm(X)
        worst_tr = max(worst_tr, abs(np.trace(Y)) / norm)
        worst_herm = max(worst_herm, np.abs(Y - Y.conj().T).max() / norm)
    ok = worst_tr <= 1e-12 and worst_herm <= 1e-12
    return CheckResult("trace preservation", ok,
                       f"max |tr L[X]|/|X| = {worst_tr:.2e}, Hermiticity {worst_herm:.2e}")


def check_steady_state(params=None):
    params = params or presets.get_preset("fig2b").representative
    try:
        rho, info = dynamics.solve_model(params, full_output=True)
    except dynamics.SolverError as exc:
        return CheckResult("steady-state invariants", False, str(exc))
    problems = dynamics.check_density_matrix(rho)
    ok = not problems and info.residual <= dynamics.RESIDUAL_TOL
    return CheckResult("steady-state invariants", ok,
                       "; ".join(problems) or f"residual {info.residual:.2e} ({info.method})")


def _stats(params):
    return observables.photon_stats(dynamics.solve_model(params))


def _max_diff(a, b):
    out = 0.0
    for key in ("mean_n", "g2", "g3"):
        x, y = getattr(a, key), getattr(b, key)
        if (x is None) != (y is None):
            return math.inf
        if x is not None:
            out = max(out, abs(x - y) / max(1.0, abs(y)))
    return out


def check_symmetries(params=None):
    params = params or presets.fig4_base(omega_c=8.0, delta_p=-29.0, fock_cutoff=6, g1=20.0, g2=-12.0)
    ref = _stats(params)
    gauge = _max_diff(_stats(params.replace(g1=-params.g1, g2=-params.g2)), ref)
    swap = _max_diff(_stats(params.replace(g1=params.g2, g2=params.g1)), ref)
    ok = gauge <= 1e-9 and swap <= 1e-9
    return CheckResult("gauge and atom-swap invariance", ok, f"gauge {gauge:.2e}, swap {swap:.2e}")


def _oracle_err(a, b, tol):
    """Absolute error below 1e-3, relative above, scaled so that <= 1 passes."""
    if a is None or b is None:
        return 0.0 if a is None and b is None else math.inf
    diff = abs(a - b)
    return diff / tol if abs(b) < 1e-3 else diff / (tol * abs(b))


def oracle_agreement(steady, evolved, tol=1e-6):
    """Compare two :class:`PhotonStats`; returns ``(ok, mean_n error, g2 error)``."""
    dn = _oracle_err(evolved.mean_n, steady.mean_n, tol)
    dg = _oracle_err(evolved.g2, steady.g2, tol)
    return dn <= 1.0 and dg <= 1.0, dn * tol, dg * tol


def check_oracle(params=None, t_final=100.0):
    params = params or presets.get_preset("fig2b").representative
    try:
        ss = _stats(params)
        te = observables.photon_stats(dynamics.evolve_model(params, t_final))
    except dynamics.SolverError as exc:
        return CheckResult("time-evolution oracle", False, str(exc))
    ok, dn, dg = oracle_agreement(ss, te)
    return CheckResult("time-evolution oracle", ok, f"d<n> = {dn:.2e}, d g2 = {dg:.2e}")


def check_cutoff(params=None):
    params = params or presets.get_preset("fig2b").representative
    try:
        n = sweep.converge_cutoff(params)
    except dynamics.SolverError as exc:
        return CheckResult("cutoff convergence", False, str(exc))
    ok = n <= params.fock_cutoff
    return CheckResult("cutoff convergence", ok, f"converged at N_c = {n} (preset uses {params.fock_cutoff})")


def check_determinism(points=25, workers=2):
    variant = presets.get_preset("fig2b").variants[2]
    spec = sweep.SweepSpec(variant.spec.base, variant.spec.axis, variant.spec.start,
                           variant.spec.stop, points)
    texts = [output.csv_text(sweep.run_sweep(spec, workers=w), {"check": "determinism"})
             for w in (1, workers)]
    ok = texts[0] == texts[1]
    return CheckResult("determinism", ok, f"{points}-point sweep, workers 1 vs {workers}: "
                       + ("identical bytes" if ok else "CSV differs"))


def run_selfcheck(build=dynamics.build_liouvillian) -> list:
    return [
        check_trace_preservation(build),
        check_steady_state(),
        check_symmetries(),
        check_oracle(),
        check_cutoff(),
        check_determinism(),
    ]
