"""
Photon statistics of a solved state and dressed-state spectra of the
drive-free Hamiltonian.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, null_space

from . import hilbert
from .hilbert import COLLECTIVE_EXCITATIONS, HilbertSpace
from .model import ModelParams, build_hamiltonian, excitation_number

DEFINED_THRESHOLD = 1e-10


@dataclass(frozen=True)
class PhotonStats:
    """Mean photon number and equal-time correlations.

    ``g2`` / ``g3`` are ``None`` when the field is too dim for the ratio to
    mean anything (``mean_n`` below ``defined_threshold``), and ``g3`` is
    also ``None`` when the cutoff cannot hold three photons.
    """

    mean_n: float
    g2: float = None
    g3: float = None
    defined_threshold: float = DEFINED_THRESHOLD

    @property
    def g2_defined(self) -> bool:
        return self.g2 is not None

    @property
    def g3_defined(self) -> bool:
        return self.g3 is not None


def photon_distribution(rho) -> np.ndarray:
    """Photon-number probabilities ``P(n)``, traced over both atoms."""
    rho = np.asarray(rho)
    d = rho.shape[0]
    n_cav = d // (hilbert.N_LEVELS ** 2)
    if n_cav * hilbert.N_LEVELS ** 2 != d:
        raise ValueError(f"dimension {d} is not 9 * (N_c + 1)")
    return np.real(np.diagonal(rho)).reshape(hilbert.N_LEVELS ** 2, n_cav).sum(axis=0)


def factorial_moment(rho, order: int) -> float:
    """``<a^dag^k a^k> = sum_n n!/(n-k)! P(n)``."""
    p = photon_distribution(rho)
    n = np.arange(p.size)
    falling = np.ones(p.size)
    for k in range(order):
        falling = falling * (n - k)
    return float(falling @ p)


def photon_stats(rho, defined_threshold: float = DEFINED_THRESHOLD) -> PhotonStats:
    mean_n = factorial_moment(rho, 1)
    if mean_n < defined_threshold:
        return PhotonStats(mean_n, None, None, defined_threshold)
    g2 = factorial_moment(rho, 2) / mean_n ** 2
    fock_cutoff = photon_distribution(rho).size - 1
    g3 = factorial_moment(rho, 3) / mean_n ** 3 if fock_cutoff >= 3 else None
    return PhotonStats(mean_n, g2, g3, defined_threshold)


@dataclass(frozen=True)
class ManifoldSpectrum:
    """Eigenpairs of the drive-free Hamiltonian in one excitation manifold.

    Attributes
    ----------
    n_exc : int
    eigenvalues : ndarray
        Ascending, in units of kappa.
    eigenvectors : ndarray
        Full-space kets as columns, matching ``eigenvalues``.
    cavity_coupled : ndarray of bool
        True for eigenstates inside the cyclic subspace generated by H from
        the bare photon state ``|gg, n_exc>``. These are the dressed states
        reachable through the cavity; the rest of the manifold is dark.
    basis_labels : list of str
        Collective states ``"label,n"`` spanning the manifold.
    overlaps : ndarray
        ``overlaps[i, k] = |<basis_labels[i] | eigenvector k>|^2``.
    """

    n_exc: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    cavity_coupled: np.ndarray
    basis_labels: list
    overlaps: np.ndarray

    @property
    def coupled_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues[self.cavity_coupled]

    def label_overlaps(self, k: int) -> dict:
        return {lab: float(self.overlaps[i, k]) for i, lab in enumerate(self.basis_labels)}


def manifold_labels(space: HilbertSpace, n_exc: int) -> list:
    out = []
    for label, exc in COLLECTIVE_EXCITATIONS.items():
        n = n_exc - exc
        if 0 <= n <= space.fock_cutoff:
            out.append((label, n))
    return out


def _cyclic_basis(H, seed, tol):
    """Orthonormal basis of span{seed, H seed, H^2 seed, ...}."""
    basis = [seed / np.linalg.norm(seed)]
    while len(basis) < H.shape[0]:
        w = H @ basis[-1]
        Q = np.array(basis).T
        for _ in range(2):
            w = w - Q @ (Q.conj().T @ w)
        norm = np.linalg.norm(w)
        if norm < tol:
            break
        basis.append(w / norm)
    return np.array(basis).T


def manifold_spectrum(params: ModelParams, n_exc: int, include_control: bool = True) -> ManifoldSpectrum:
    """Dressed states of the ``n_exc`` excitation manifold (pump switched off)."""
    space = params.space
    if int(n_exc) != n_exc or n_exc < 0:
        raise ValueError(f"n_exc must be a non-negative integer, got {n_exc!r}")
    if n_exc > space.fock_cutoff:
        raise ValueError(f"n_exc={n_exc} needs fock_cutoff >= {n_exc}, have {space.fock_cutoff}")
    bare = params.replace(omega_p=0.0, omega_c=params.omega_c if include_control else 0.0)
    H = build_hamiltonian(bare, space).toarray()
    grading = np.real(excitation_number(space).diagonal())
    block = np.flatnonzero(np.isclose(grading, n_exc))
    Hb = H[np.ix_(block, block)]

    seed = np.zeros(block.size, dtype=complex)
    seed[np.searchsorted(block, space.index("g", "g", n_exc))] = 1.0
    scale = max(1.0, np.abs(Hb).max()) if Hb.size else 1.0
    K = _cyclic_basis(Hb, seed, 1e-9 * scale)
    w_c, u_c = eigh(K.conj().T @ Hb @ K)
    vals, vecs, coupled = [w_c], [K @ u_c], [np.ones(w_c.size, bool)]
    if K.shape[1] < block.size:
        Q = null_space(K.conj().T)
        w_d, u_d = eigh(Q.conj().T @ Hb @ Q)
        vals.append(w_d)
        vecs.append(Q @ u_d)
        coupled.append(np.zeros(w_d.size, bool))
    vals = np.concatenate(vals)
    vecs = np.hstack(vecs)
    coupled = np.concatenate(coupled)
    order = np.argsort(vals, kind="stable")

    full = np.zeros((space.total_dim, block.size), dtype=complex)
    full[block] = vecs[:, order]
    labels = manifold_labels(space, n_exc)
    label_kets = np.array([hilbert.collective_ket(space, lab, n) for lab, n in labels])
    overlaps = np.abs(label_kets.conj() @ full) ** 2
    return ManifoldSpectrum(
        n_exc=int(n_exc),
        eigenvalues=vals[order],
        eigenvectors=full,
        cavity_coupled=coupled[order],
        basis_labels=[f"{lab},{n}" for lab, n in labels],
        overlaps=overlaps,
    )


def local_maxima(x, y) -> list:
    """Interior strict local maxima of ``y`` as ``(x, y)`` pairs.

    A plateau counts once, at its smallest ``x``; plateaus touching either
    end of the data are not interior.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise ValueError("x and y must have the same length")
    if x.size < 3:
        raise ValueError("need at least 3 points to locate interior maxima")
    starts = np.r_[0, np.flatnonzero(y[1:] != y[:-1]) + 1]
    run_vals = y[starts]
    peaks = []
    for r in range(1, starts.size - 1):
        if run_vals[r] > run_vals[r - 1] and run_vals[r] > run_vals[r + 1]:
            peaks.append((float(x[starts[r]]), float(run_vals[r])))
    return peaks


def peak_structure(rows, key: str = "mean_n") -> list:
    """Local maxima of ``key`` over sweep rows sorted by ``axis_value``."""
    rows = list(rows)
    x = [r.axis_value for r in rows]
    if any(b < a for a, b in zip(x, x[1:])):
        raise ValueError("rows must be sorted by axis_value")
    y = [getattr(r, key) for r in rows]
    return local_maxima(x, [np.nan if v is None else v for v in y])
