import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavityblockade import dynamics as dy
from cavityblockade import hilbert as hb
from cavityblockade.model import ModelParams, build_hamiltonian, collapse_operators
from cavityblockade.observables import photon_stats
from cavityblockade.presets import fig2_base, fig4_base


def random_hermitian(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return x + x.conj().T


def random_density(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


def dense_lindblad(H, jumps, rho):
    H = H.toarray()
    out = -1j * (H @ rho - rho @ H)
    for C in jumps:
        C = C.toarray()
        CdC = C.conj().T @ C
        out += C @ rho @ C.conj().T - 0.5 * (CdC @ rho + rho @ CdC)
    return out


def test_vec_round_trip_and_trace_indices():
    rng = np.random.default_rng(0)
    rho = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    v = dy.vec(rho)
    assert v[2 + 5 * 3] == rho[2, 3]
    np.testing.assert_array_equal(dy.unvec(v), rho)
    assert np.isclose(v[dy._trace_indices(5)].sum(), np.trace(rho))


def test_liouvillian_matches_dense_master_equation():
    rng = np.random.default_rng(1)
    p = ModelParams(g1=3, g2=-2, omega_p=1.2, omega_c=0.7, delta_p=-1, delta_c=2, fock_cutoff=3)
    H, jumps = build_hamiltonian(p), collapse_operators(p)
    L = dy.build_liouvillian(H, jumps)
    for _ in range(5):
        rho = random_hermitian(rng, p.space.total_dim)
        np.testing.assert_allclose(dy.apply_liouvillian(L, rho), dense_lindblad(H, jumps, rho),
                                   atol=1e-11)


def test_pure_commutator_against_dense():
    rng = np.random.default_rng(2)
    d = hb.HilbertSpace(2).total_dim
    H = hb.canonical(random_hermitian(rng, d))
    L = dy.build_liouvillian(H, [])
    Hd = H.toarray()
    for _ in range(20):
        rho = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        np.testing.assert_allclose(dy.apply_liouvillian(L, rho), -1j * (Hd @ rho - rho @ Hd),
                                   atol=1e-12)


def test_fast_liouvillian_matches_reference():
    rng = np.random.default_rng(3)
    for N in (2, 5):
        for _ in range(3):
            vals = rng.uniform(-30, 30, size=6)
            rates = rng.uniform(0, 2, size=3) + np.array([0.1, 0, 0])
            p = ModelParams(*vals, *rates, fock_cutoff=N)
            ref = dy.build_liouvillian(build_hamiltonian(p), collapse_operators(p))
            assert abs(dy.model_liouvillian(p) - ref).max() < 1e-12


def test_cavity_decay_generator():
    space = hb.HilbertSpace(3)
    a = hb.annihilation(space)
    L = dy.build_liouvillian(hb.scale(0, hb.identity(space)), [a])
    one = np.outer(hb.basis_ket(space, "g", "g", 1), hb.basis_ket(space, "g", "g", 1).conj())
    out = dy.apply_liouvillian(L, one)
    assert abs(np.trace(out)) < 1e-15
    assert out[0, 0].real == pytest.approx(1.0)
    assert out[1, 1].real == pytest.approx(-1.0)


def test_trace_and_hermiticity_preservation():
    rng = np.random.default_rng(4)
    p = fig4_base(omega_c=8.0, delta_p=-29.0, fock_cutoff=6)
    L = dy.model_liouvillian(p)
    d = p.space.total_dim
    out = dy.apply_liouvillian(L, dy.maximally_mixed(p.space))
    assert abs(np.trace(out)) <= 1e-12
    for _ in range(10):
        X = random_hermitian(rng, d)
        Y = dy.apply_liouvillian(L, X)
        norm = np.linalg.norm(X)
        assert abs(np.trace(Y)) <= 1e-12 * norm
        assert np.abs(Y - Y.conj().T).max() <= 1e-12 * norm


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        dy.build_liouvillian(hb.identity(hb.HilbertSpace(2)), [hb.annihilation(hb.HilbertSpace(3))])


@pytest.mark.parametrize("method", ["direct", "krylov", "auto"])
def test_undriven_model_relaxes_to_vacuum(method):
    p = ModelParams(g1=20, g2=20, omega_c=5, delta_p=-3, delta_c=7)
    rho = dy.solve_model(p, method=method)
    assert photon_stats(rho).mean_n <= 1e-12
    np.testing.assert_allclose(rho, dy.vacuum(p.space), atol=1e-12)


def test_krylov_agrees_with_direct():
    for p in (fig2_base(omega_c=5.0, delta_p=-20.0),
              fig4_base(omega_c=8.0, delta_p=-29.0, fock_cutoff=6),
              fig4_base(delta_p=0.0, fock_cutoff=8)):
        a, ia = dy.solve_model(p, method="krylov", full_output=True)
        b, ib = dy.solve_model(p, method="direct", full_output=True)
        assert ia.method == "krylov" and ib.method == "lu"
        assert np.abs(a - b).max() < 1e-10
        assert max(ia.residual, ib.residual) <= dy.RESIDUAL_TOL


def test_steady_state_invariants_and_determinism():
    p = fig2_base(delta_p=-math.sqrt(2) * 20)
    rho, info = dy.solve_model(p, full_output=True)
    assert dy.check_density_matrix(rho) == []
    assert info.residual <= info.tolerance
    again = dy.solve_model(p)
    assert np.array_equal(rho, again)
    assert photon_stats(rho).g2 < 1


def test_generic_steady_state_entry_point():
    p = fig2_base(omega_c=5.0, delta_p=10.0, fock_cutoff=4)
    L = dy.build_liouvillian(build_hamiltonian(p), collapse_operators(p))
    rho = dy.steady_state(L)
    np.testing.assert_allclose(rho, dy.solve_model(p), atol=1e-10)


def test_non_unique_steady_state_is_reported():
    # no atomic decay, no coupling, no pump: every atomic population is stationary
    p = ModelParams(gamma_m=0, gamma_e=0, omega_c=2, fock_cutoff=3)
    for method in dy.SOLVE_METHODS:
        with pytest.raises(dy.NonUniqueSteadyStateError):
            dy.solve_model(p, method=method)


def test_check_density_matrix_flags_problems():
    rho = np.diag([0.6, 0.4, -1e-9]).astype(complex)
    assert dy.check_density_matrix(rho, trace_tol=1e-8) == []
    bad = np.diag([0.6, 0.5, -0.1]).astype(complex)
    problems = dy.check_density_matrix(bad)
    assert len(problems) == 1 and "eigenvalue" in problems[0]
    skew = np.array([[0.5, 1j], [0, 0.5]])
    assert any("Hermiticity" in s for s in dy.check_density_matrix(skew))


@settings(max_examples=6, deadline=None)
@given(st.sampled_from([0.5, 2.0]), st.floats(-40, 40), st.floats(0, 10))
def test_scale_invariance(s, delta_p, omega_c):
    p = fig4_base(omega_c=omega_c, delta_p=delta_p, fock_cutoff=5)
    a, b = photon_stats(dy.solve_model(p)), photon_stats(dy.solve_model(p.scaled(s)))
    for key in ("mean_n", "g2", "g3"):
        x, y = getattr(a, key), getattr(b, key)
        assert abs(x - y) <= 1e-8 * max(1.0, abs(x))


def test_free_cavity_decay_analytic():
    space = hb.HilbertSpace(3)
    a = hb.annihilation(space)
    H = hb.scale(0, hb.identity(space))
    ket = hb.basis_ket(space, "g", "g", 1)
    rho0 = np.outer(ket, ket.conj())
    states = dy.time_evolve(H, [a], rho0, 3.0, times=[1.0, 3.0])
    n_op = (hb.dag(a) @ a).toarray()
    for t, rho in zip((1.0, 3.0), states):
        assert abs(np.trace(n_op @ rho).real - math.exp(-t)) <= 1e-8


def test_unitary_limit_conserves_trace_and_purity():
    p = fig2_base(delta_p=-10.0, omega_p=1.0, fock_cutoff=3)
    H = build_hamiltonian(p)
    rng = np.random.default_rng(5)
    psi = rng.normal(size=p.space.total_dim) + 1j * rng.normal(size=p.space.total_dim)
    psi /= np.linalg.norm(psi)
    # purity is not monitored by the integrator, so tighten the step control
    rho = dy.time_evolve(H, [], np.outer(psi, psi.conj()), 10.0, rtol=1e-10, atol=1e-13)
    assert abs(np.trace(rho) - 1) <= 1e-9
    assert abs(np.trace(rho @ rho).real - 1) <= 1e-9


def test_time_evolution_rejects_bad_input():
    space = hb.HilbertSpace(2)
    H = hb.identity(space)
    with pytest.raises(ValueError):
        dy.time_evolve(H, [], dy.vacuum(space), 0.0)
    with pytest.raises(ValueError):
        dy.time_evolve(H, [], 2 * dy.vacuum(space), 1.0)


def test_fig2_point_oracle_at_t50():
    p = fig2_base(delta_p=-math.sqrt(2) * 20, fock_cutoff=4)
    ss = photon_stats(dy.solve_model(p))
    te = photon_stats(dy.evolve_model(p, 50.0))
    assert abs(ss.mean_n - te.mean_n) <= 1e-6


def test_uniqueness_from_two_initial_states():
    # fast e-level decay so that both transients die out well before t = 100
    p = ModelParams(g1=20, g2=20, omega_p=1.0, omega_c=5.0, delta_p=-10.0, gamma_e=1.0,
                    fock_cutoff=4)
    ss = dy.solve_model(p)
    a = dy.evolve_model(p, 100.0)
    b = dy.evolve_model(p, 100.0, rho0=dy.maximally_mixed(p.space))
    assert np.abs(a - ss).max() <= 1e-6
    assert np.abs(b - ss).max() <= 1e-6
