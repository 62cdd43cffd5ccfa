import itertools

import numpy as np
import pytest
import scipy.sparse as sp

from cavityblockade import hilbert as hb
from cavityblockade.hilbert import HilbertSpace


def assert_clean(op):
    """No stored zeros and no duplicate (row, col) entries."""
    assert np.all(op.data != 0)
    coo = op.tocoo()
    pairs = set(zip(coo.row.tolist(), coo.col.tolist()))
    assert len(pairs) == coo.nnz


def test_dimensions():
    space = HilbertSpace(4)
    assert space.dims == (3, 3, 5)
    assert space.total_dim == 45
    assert space.photon_numbers().tolist()[:6] == [0, 1, 2, 3, 4, 0]


def test_index_round_trip():
    space = HilbertSpace(5)
    for i in range(space.total_dim):
        assert space.index(*space.labels(i)) == i
    assert space.index("g", "g", 0) == 0
    assert space.index("e", "e", 5) == space.total_dim - 1
    assert space.index("m", "g", 2) == 3 * 6 + 2


@pytest.mark.parametrize("bad", [-1, 2.5])
def test_bad_cutoff(bad):
    with pytest.raises(ValueError):
        HilbertSpace(bad)


def test_index_errors():
    space = HilbertSpace(2)
    with pytest.raises(ValueError):
        space.index("g", "g", 3)
    with pytest.raises(ValueError):
        space.index("x", "g", 0)
    with pytest.raises(ValueError):
        space.labels(space.total_dim)


def test_annihilation_ladder():
    space = HilbertSpace(4)
    a = hb.annihilation(space)
    for n in range(1, 5):
        out = a @ hb.basis_ket(space, "m", "e", n)
        np.testing.assert_allclose(out, np.sqrt(n) * hb.basis_ket(space, "m", "e", n - 1))
    assert np.allclose(a @ hb.basis_ket(space, "g", "g", 0), 0)
    assert_clean(a)


def test_annihilation_needs_photons():
    with pytest.raises(ValueError):
        hb.annihilation(HilbertSpace(0))


def test_transition_action():
    space = HilbertSpace(3)
    s2_em = hb.atomic_operator(space, 2, "e", "m")
    np.testing.assert_array_equal(s2_em @ hb.basis_ket(space, "g", "m", 2),
                                  hb.basis_ket(space, "g", "e", 2))
    assert np.allclose(s2_em @ hb.basis_ket(space, "m", "g", 2), 0)


def test_transition_adjoints_exhaustive():
    space = HilbertSpace(2)
    for j, a, b in itertools.product((1, 2), hb.LEVELS, hb.LEVELS):
        op = hb.atomic_operator(space, j, a, b)
        assert_clean(op)
        assert (hb.dag(op) != hb.atomic_operator(space, j, b, a)).nnz == 0


def test_embed_atom_rejects_third_atom():
    with pytest.raises(ValueError):
        hb.embed_atom(HilbertSpace(2), 3, hb.transition("g", "m"))


def test_embedding_commutes_with_products():
    rng = np.random.default_rng(0)
    for N in range(1, 5):
        space = HilbertSpace(N)
        A, B = rng.normal(size=(2, 3, 3)) + 1j * rng.normal(size=(2, 3, 3))
        for j in (1, 2):
            lhs = hb.embed_atom(space, j, A @ B).toarray()
            rhs = (hb.embed_atom(space, j, A) @ hb.embed_atom(space, j, B)).toarray()
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)
        C, D = rng.normal(size=(2, N + 1, N + 1))
        np.testing.assert_allclose(hb.embed_cavity(space, C @ D).toarray(),
                                   (hb.embed_cavity(space, C) @ hb.embed_cavity(space, D)).toarray(),
                                   atol=1e-12)


def _random_sparse(rng, d, density=0.2):
    m = sp.random(d, d, density=density, random_state=rng, format="csr")
    return hb.canonical(m + 1j * sp.random(d, d, density=density, random_state=rng, format="csr"))


def test_compose_against_dense():
    rng = np.random.default_rng(1)
    d = HilbertSpace(6).total_dim
    A, B = _random_sparse(rng, d), _random_sparse(rng, d)
    np.testing.assert_allclose(hb.dag(hb.mul(A, B)).toarray(),
                               (A.toarray() @ B.toarray()).conj().T, atol=1e-12)
    np.testing.assert_allclose(hb.mul(hb.dag(B), hb.dag(A)).toarray(),
                               hb.dag(hb.mul(A, B)).toarray(), atol=1e-12)
    assert (hb.add(A, hb.scale(0, B)) != A).nnz == 0
    for op in (hb.add(A, B), hb.mul(A, B), hb.scale(2j, A), hb.add(A, hb.scale(-1, A))):
        assert_clean(op)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        hb.add(hb.identity(HilbertSpace(2)), hb.identity(HilbertSpace(3)))
    with pytest.raises(ValueError):
        hb.mul(hb.identity(HilbertSpace(2)), hb.identity(HilbertSpace(3)))


def test_truncated_commutator():
    space = HilbertSpace(4)
    a = hb.annihilation(space)
    comm = hb.commutator(a, hb.dag(a)).toarray()
    keep = space.photon_numbers() < space.fock_cutoff
    np.testing.assert_allclose(comm[np.ix_(keep, keep)], np.eye(keep.sum()), atol=1e-14)
    top = ~keep
    np.testing.assert_allclose(np.diag(comm)[top], -space.fock_cutoff)


def test_collective_states_orthonormal():
    space = HilbertSpace(2)
    kets = np.array([hb.collective_ket(space, lab, 1) for lab in hb.COLLECTIVE_STATES])
    np.testing.assert_allclose(kets.conj() @ kets.T, np.eye(9), atol=1e-14)
    with pytest.raises(ValueError):
        hb.collective_ket(space, "xx", 0)


def test_swap_and_parity_unitaries():
    space = HilbertSpace(3)
    U = hb.swap_unitary(space)
    np.testing.assert_array_equal((U @ U).toarray(), np.eye(space.total_dim))
    s1 = hb.atomic_operator(space, 1, "m", "g")
    s2 = hb.atomic_operator(space, 2, "m", "g")
    assert abs(U @ s1 @ U - s2).max() == 0
    P = hb.parity_unitary(space)
    a = hb.annihilation(space)
    assert abs(P @ a @ P + a).max() == 0
