"""
Liouvillian construction, steady states and time evolution.

Density matrices are vectorized by stacking columns (Fortran order), so
``rho[i, j]`` sits at ``i + D * j`` and ``vec(A rho B) = (B^T kron A) vec(rho)``.
Under this convention the trace of ``rho`` is ``sum(v[k * (D + 1)])``.

Two steady-state routes are provided. :func:`steady_state` is a direct sparse
solve of ``L v = 0`` with the first equation replaced by the trace
constraint, followed by a few steps of iterative refinement with the same LU
factors; if the factorization is singular, the null space is probed with a
shift-invert eigensolver so that a degenerate steady state is reported
rather than papered over. :func:`steady_state_krylov` runs GMRES
preconditioned by the exact inverse of the no-jump part of ``L``, which
avoids the LU fill-in and is what :func:`solve_model` uses by default.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spl
from scipy.integrate import solve_ivp
from scipy.linalg import schur
from scipy.linalg.lapack import ztrsyl

from . import hilbert, model
from .model import ModelParams

TRACE_TOL = 1e-10
HERM_TOL = 1e-10
PSD_TOL = 1e-8
RESIDUAL_TOL = 1e-10


class SolverError(RuntimeError):
    """Base class for numerical failures."""


class SteadyStateError(SolverError):
    """The steady-state solve did not meet its residual or state invariants."""


class NonUniqueSteadyStateError(SteadyStateError):
    """The Liouvillian has more than one null direction."""


class IntegrationError(SolverError):
    """Time integration failed or drifted off the physical manifold."""


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return np.asarray(v).reshape(d, d, order="F")


def _trace_indices(d: int) -> np.ndarray:
    return np.arange(d) * (d + 1)


def _superop_commutator(H) -> sp.csr_matrix:
    d = H.shape[0]
    eye = sp.identity(d, dtype=complex, format="csr")
    return -1j * (sp.kron(eye, H, format="csr") - sp.kron(H.T, eye, format="csr"))


def _superop_dissipator(C) -> sp.csr_matrix:
    d = C.shape[0]
    eye = sp.identity(d, dtype=complex, format="csr")
    cdc = (C.conj().T @ C).tocsr()
    return (sp.kron(C.conj(), C, format="csr")
            - 0.5 * sp.kron(eye, cdc, format="csr")
            - 0.5 * sp.kron(cdc.T, eye, format="csr"))


def build_liouvillian(H, jumps) -> sp.csr_matrix:
    """``L[rho] = -i[H, rho] + sum_k (C rho C^dag - {C^dag C, rho}/2)`` as a D^2 x D^2 matrix."""
    H = sp.csr_matrix(H, dtype=complex)
    jumps = [sp.csr_matrix(C, dtype=complex) for C in jumps]
    hilbert._check_dims(H, *jumps)
    L = _superop_commutator(H)
    for C in jumps:
        L = L + _superop_dissipator(C)
    return hilbert.canonical(L)


def apply_liouvillian(L, rho: np.ndarray) -> np.ndarray:
    return unvec(L @ vec(rho))


class _LinearCombination:
    """Sparse matrices sharing one CSC pattern, recombined with new weights cheaply."""

    def __init__(self, mats):
        mats = [sp.csc_matrix(m, dtype=complex) for m in mats]
        shape = mats[0].shape
        pattern = sp.csc_matrix(shape, dtype=float)
        for m in mats:
            pattern = pattern + abs(m)
        pattern = sp.csc_matrix(pattern)
        pattern.sort_indices()
        self.shape = shape
        self.indices = pattern.indices.copy()
        self.indptr = pattern.indptr.copy()
        n_rows = shape[0]
        cols = np.repeat(np.arange(shape[1]), np.diff(self.indptr))
        keys = cols.astype(np.int64) * n_rows + self.indices
        self.data = np.zeros((len(mats), keys.size), dtype=complex)
        for k, m in enumerate(mats):
            m = m.copy()
            m.sum_duplicates()
            mcols = np.repeat(np.arange(shape[1]), np.diff(m.indptr))
            mkeys = mcols.astype(np.int64) * n_rows + m.indices
            self.data[k, np.searchsorted(keys, mkeys)] = m.data

    def combine(self, weights) -> sp.csc_matrix:
        data = np.asarray(weights, dtype=complex) @ self.data
        out = sp.csc_matrix((data, self.indices.copy(), self.indptr.copy()), shape=self.shape)
        # stored zeros (from vanishing parameters) distort the fill-reducing ordering
        out.eliminate_zeros()
        return out


def _trace_row(d: int) -> sp.csr_matrix:
    cols = _trace_indices(d)
    return sp.csr_matrix((np.ones(d, complex), (np.zeros(d, int), cols)), shape=(1, d * d))


def _augment(L) -> sp.csc_matrix:
    """Replace the first equation of ``L v = 0`` by ``tr(rho) = 1``."""
    L = sp.csr_matrix(L)
    d = int(round(np.sqrt(L.shape[0])))
    return sp.vstack([_trace_row(d), L[1:]], format="csc")


_COEF_ORDER = ("delta_m", "delta_e", "delta_cav", "g1", "g2", "omega_p", "omega_c",
               "kappa", "gamma_e", "gamma_m")


class LiouvillianFactory:
    """Pre-assembled parameter components of the model Liouvillian for one cutoff.

    ``L(params)`` is linear in every detuning, coupling and rate, so the
    superoperator for a new parameter point is a weighted sum of ten fixed
    sparse matrices on a shared pattern.
    """

    def __init__(self, fock_cutoff: int):
        space = hilbert.HilbertSpace(fock_cutoff)
        self.space = space
        terms = model.hamiltonian_terms(space)
        comps = [_superop_commutator(terms[k]) for k in _COEF_ORDER[:7]]
        jt = model.jump_terms(space)
        for name in _COEF_ORDER[7:]:
            comps.append(sum(_superop_dissipator(C) for C in jt[name]))
        self._full = _LinearCombination(comps)
        d = space.total_dim
        keep = sp.diags(np.r_[0.0, np.ones(d * d - 1)])
        aug = [keep @ sp.csr_matrix(c) for c in comps] + [sp.vstack(
            [_trace_row(d), sp.csr_matrix((d * d - 1, d * d), dtype=complex)])]
        self._augmented = _LinearCombination(aug)

    @staticmethod
    def weights(params: ModelParams) -> list:
        coefs = model.hamiltonian_coefficients(params)
        return [coefs[k] for k in _COEF_ORDER[:7]] + [params.kappa, params.gamma_e, params.gamma_m]

    def liouvillian(self, params: ModelParams) -> sp.csc_matrix:
        return self._full.combine(self.weights(params))

    def augmented(self, params: ModelParams) -> sp.csc_matrix:
        return self._augmented.combine(self.weights(params) + [1.0])


@lru_cache(maxsize=8)
def liouvillian_factory(fock_cutoff: int) -> LiouvillianFactory:
    return LiouvillianFactory(fock_cutoff)


def model_liouvillian(params: ModelParams) -> sp.csr_matrix:
    """Liouvillian of the model at ``params`` (fast cached path)."""
    return hilbert.canonical(liouvillian_factory(params.fock_cutoff).liouvillian(params))


@dataclass(frozen=True)
class SolveInfo:
    residual: float
    method: str
    tolerance: float


def check_density_matrix(rho, trace_tol=TRACE_TOL, herm_tol=HERM_TOL, psd_tol=PSD_TOL):
    """Return a list of violated density-matrix invariants (empty if valid)."""
    rho = np.asarray(rho)
    problems = []
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        problems.append(f"trace {tr:.3g} differs from 1 by more than {trace_tol:g}")
    herm = np.max(np.abs(rho - rho.conj().T)) if rho.size else 0.0
    if herm > herm_tol:
        problems.append(f"Hermiticity error {herm:.3g} exceeds {herm_tol:g}")
    min_eig = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if min_eig < -psd_tol:
        problems.append(f"minimum eigenvalue {min_eig:.3g} below -{psd_tol:g}")
    return problems


def _residual_scale(L) -> float:
    L = sp.csr_matrix(L)
    return max(1.0, float(np.max(np.abs(L.data))) if L.nnz else 1.0)


def _null_space_solve(L, tol):
    """Fallback: null vector of L from shift-invert Arnoldi; detects degeneracy."""
    n = L.shape[0]
    k = min(3, n - 2)
    try:
        vals, vecs = spl.eigs(sp.csc_matrix(L), k=k, sigma=-1e-6, which="LM")
    except (RuntimeError, spl.ArpackError) as exc:
        raise SteadyStateError(f"null-space eigensolve failed: {exc}") from exc
    order = np.argsort(np.abs(vals))
    vals, vecs = vals[order], vecs[:, order]
    null_tol = 1e-8 * _residual_scale(L)
    if np.sum(np.abs(vals) < null_tol) > 1:
        raise NonUniqueSteadyStateError(
            f"Liouvillian has {np.sum(np.abs(vals) < null_tol)} near-zero eigenvalues; "
            "steady state is not unique")
    v = vecs[:, 0]
    d = int(round(np.sqrt(n)))
    v = v / v[_trace_indices(d)].sum()
    return v


def steady_state(L, *, refinements: int = 3, tol: float = RESIDUAL_TOL,
                 full_output: bool = False, augmented=None):
    """Unique unit-trace fixed point of the Liouvillian ``L``.

    Parameters
    ----------
    L : sparse matrix
        Liouvillian acting on column-stacked density matrices.
    refinements : int
        Iterative-refinement sweeps reusing the LU factors.
    tol : float
        Residual bound, relative to the largest entry of ``L`` (floored at 1).
    full_output : bool
        Also return a :class:`SolveInfo`.
    augmented : sparse matrix, optional
        Pre-built trace-augmented system (from :class:`LiouvillianFactory`).

    Raises
    ------
    NonUniqueSteadyStateError
        If the null space of ``L`` is more than one-dimensional.
    SteadyStateError
        If the residual or the density-matrix invariants are not met.
    """
    L = sp.csr_matrix(L, dtype=complex)
    n = L.shape[0]
    d = int(round(np.sqrt(n)))
    if d * d != n or L.shape[1] != n:
        raise ValueError(f"Liouvillian shape {L.shape} is not D^2 x D^2")
    A = _augment(L) if augmented is None else sp.csc_matrix(augmented)
    b = np.zeros(n, dtype=complex)
    b[0] = 1.0
    method = "lu"
    try:
        lu = spl.splu(A, permc_spec="COLAMD")
    except RuntimeError:
        lu = None
    if lu is not None:
        v = lu.solve(b)
        for _ in range(refinements):
            v = v + lu.solve(b - A @ v)
        if not np.all(np.isfinite(v)):
            lu = None
    if lu is None:
        method = "eigs"
        v = _null_space_solve(L, tol)

    limit = tol * _residual_scale(L)
    residual = float(np.linalg.norm(L @ v))
    if not residual <= limit:
        raise SteadyStateError(f"steady-state residual {residual:.3g} exceeds {limit:.3g} ({method})")
    rho = unvec(v)
    problems = check_density_matrix(rho)
    if problems:
        raise SteadyStateError("steady state violates invariants: " + "; ".join(problems))
    if full_output:
        return rho, SolveInfo(residual, method, limit)
    return rho


class NoJumpSylvester:
    """Inverse of ``X -> A X + X A^dag`` with ``A = -iH - sum(C^dag C)/2``.

    One complex Schur decomposition of ``A`` turns every application into a
    triangular Sylvester solve (LAPACK ``ztrsyl``), O(D^3) on D x D matrices
    rather than a factorization of the D^2 x D^2 superoperator. If ``A`` is
    not strictly stable (undriven ground state), it is shifted by ``-shift/2``
    so the map stays invertible; it is then only an approximate inverse.
    """

    def __init__(self, H, jumps, shift: float = 0.5):
        H = _dense(H)
        A = -1j * H
        for C in jumps:
            C = _dense(C)
            A = A - 0.5 * (C.conj().T @ C)
        T, U = schur(A, output="complex")
        scale = max(1.0, np.abs(A).max())
        self.shift = 0.0
        if np.real(np.diag(T)).max() > -1e-9 * scale:
            self.shift = shift
            T = T - 0.5 * shift * np.eye(T.shape[0])
        self.T, self.U = T, U
        self.dim = H.shape[0]

    def solve(self, y: np.ndarray) -> np.ndarray:
        U = self.U
        Y = U.conj().T @ unvec(y) @ U
        X, scale, info = ztrsyl(self.T, self.T, Y, trana="N", tranb="C", isgn=1)
        if info < 0:
            raise SteadyStateError(f"ztrsyl rejected argument {-info}")
        return vec(U @ (X / scale) @ U.conj().T)


def _dense(op):
    return op.toarray() if sp.issparse(op) else np.asarray(op, dtype=complex)


def steady_state_krylov(L, H, jumps, *, tol: float = RESIDUAL_TOL, gmres_rtol: float = 1e-14,
                        maxiter: int = 50, full_output: bool = False):
    """Steady state by GMRES on ``L + w tr^T`` preconditioned with the no-jump generator.

    ``w`` is the vacuum projector, which has unit trace and so lies outside
    the (traceless) range of ``L``; the bordered operator is nonsingular and
    ``x = rho_ss`` solves ``(L + w tr^T) x = w``. When some state is left
    undamped by the no-jump generator (no pump), uniqueness is probed by
    re-solving with the maximally mixed border: a unique fixed point does not
    depend on ``w``.
    """
    L = sp.csr_matrix(L, dtype=complex)
    n = L.shape[0]
    d = int(round(np.sqrt(n)))
    tri = _trace_indices(d)
    pre = NoJumpSylvester(H, jumps)
    if pre.dim != d:
        raise ValueError(f"Hamiltonian dimension {pre.dim} does not match Liouvillian ({d})")
    limit = tol * _residual_scale(L)
    P = spl.LinearOperator((n, n), matvec=pre.solve, dtype=complex)

    def bordered_solve(w):
        M = spl.LinearOperator((n, n), matvec=lambda x: L @ x + w * x[tri].sum(), dtype=complex)
        v, info = spl.gmres(M, w, M=P, rtol=gmres_rtol, atol=0.0, restart=100, maxiter=maxiter)
        residual = float(np.linalg.norm(L @ v)) if np.all(np.isfinite(v)) else np.inf
        if not residual <= limit:
            raise SteadyStateError(f"GMRES residual {residual:.3g} exceeds {limit:.3g} (info={info})")
        return v, residual

    w = np.zeros(n, dtype=complex)
    w[0] = 1.0
    v, residual = bordered_solve(w)
    if pre.shift > 0:
        v2, _ = bordered_solve(vec(np.eye(d, dtype=complex) / d))
        gap = np.abs(v - v2).max()
        if gap > 1e-6:
            raise NonUniqueSteadyStateError(
                f"steady state depends on the trace border (difference {gap:.3g}); not unique")
    rho = unvec(v)
    problems = check_density_matrix(rho)
    if problems:
        raise SteadyStateError("steady state violates invariants: " + "; ".join(problems))
    if full_output:
        return rho, SolveInfo(residual, "krylov", limit)
    return rho


SOLVE_METHODS = ("auto", "krylov", "direct")


def solve_model(params: ModelParams, full_output: bool = False, method: str = "auto"):
    """Steady state of the model at ``params``.

    ``"direct"`` is the trace-replacement LU solve of :func:`steady_state`;
    ``"krylov"`` is :func:`steady_state_krylov`; ``"auto"`` tries the Krylov
    path and falls back to the direct solve if it fails. The LU fill grows
    quickly once the control field couples the ``e`` levels, which is why the
    Krylov path is preferred.
    """
    if method not in SOLVE_METHODS:
        raise ValueError(f"method must be one of {SOLVE_METHODS}, got {method!r}")
    factory = liouvillian_factory(params.fock_cutoff)
    L = factory.liouvillian(params)
    if method in ("auto", "krylov"):
        space = factory.space
        try:
            return steady_state_krylov(L, model.build_hamiltonian(params, space),
                                       model.collapse_operators(params, space),
                                       full_output=full_output)
        except NonUniqueSteadyStateError:
            raise
        except SteadyStateError:
            if method == "krylov":
                raise
    return steady_state(L, augmented=factory.augmented(params), full_output=full_output)


def time_evolve(H, jumps, rho0, t_final: float, *, rtol: float = 1e-8, atol: float = 1e-12,
                times=None, method: str = "DOP853", drift_tol: float = 1e-9):
    """Integrate the master equation from ``rho0`` with adaptive step control.

    Returns the state at ``t_final``, or an array of states at ``times`` if
    given. Raises :class:`IntegrationError` on step-size failure or if the
    trace or Hermiticity drifts by more than ``drift_tol``.
    """
    if not t_final > 0:
        raise ValueError(f"t_final must be > 0, got {t_final}")
    rho0 = np.asarray(rho0, dtype=complex)
    problems = check_density_matrix(rho0)
    if problems:
        raise ValueError("initial state is not a density matrix: " + "; ".join(problems))
    L = build_liouvillian(H, jumps)
    t_eval = [t_final] if times is None else np.asarray(times, dtype=float)
    if times is not None and (np.any(t_eval < 0) or np.any(t_eval > t_final)):
        raise ValueError("times must lie in [0, t_final]")

    sol = solve_ivp(lambda t, y: L @ y, (0.0, t_final), vec(rho0), method=method,
                    t_eval=t_eval, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise IntegrationError(f"integration failed: {sol.message}")

    tr0 = np.trace(rho0)
    states = []
    for y in sol.y.T:
        rho = unvec(y).copy()
        drift = abs(np.trace(rho) - tr0)
        herm = np.max(np.abs(rho - rho.conj().T))
        if drift > drift_tol or herm > drift_tol:
            raise IntegrationError(f"invariant drift: trace {drift:.3g}, Hermiticity {herm:.3g}")
        states.append(rho)
    return states[-1] if times is None else np.array(states)


def evolve_model(params: ModelParams, t_final: float, rho0=None, **kwargs):
    """Time-evolve the model from ``rho0`` (vacuum by default)."""
    space = params.space
    if rho0 is None:
        rho0 = vacuum(space)
    H = model.build_hamiltonian(params, space)
    return time_evolve(H, model.collapse_operators(params, space), rho0, t_final, **kwargs)


def vacuum(space) -> np.ndarray:
    """``|g, g, 0><g, g, 0|``."""
    rho = np.zeros((space.total_dim,) * 2, dtype=complex)
    rho[0, 0] = 1.0
    return rho


def maximally_mixed(space) -> np.ndarray:
    return np.eye(space.total_dim, dtype=complex) / space.total_dim
