"""
Truncated-Fock operator algebra for two three-level atoms and one cavity mode.

The composite space is ordered ``atom1 (x) atom2 (x) cavity`` and indexed
row-major, so the basis state ``|s1, s2, n>`` sits at::

    index = (s1 * 3 + s2) * (N_c + 1) + n

with atomic levels ``g = 0``, ``m = 1``, ``e = 2`` and photon numbers
``n = 0 .. N_c``. Every module relies on this single convention.

Operators are ``scipy.sparse.csr_matrix`` objects of complex dtype. All
constructors return canonical matrices: sorted indices, no duplicate
entries and no stored zeros.
"""
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

LEVELS = ("g", "m", "e")
N_LEVELS = 3
N_ATOMS = 2


@dataclass(frozen=True)
class HilbertSpace:
    """Two three-level atoms and a cavity truncated at ``fock_cutoff`` photons."""

    fock_cutoff: int

    def __post_init__(self):
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 0:
            raise ValueError(f"fock_cutoff must be a non-negative integer, got {self.fock_cutoff!r}")

    @property
    def atom_levels(self) -> int:
        return N_LEVELS

    @property
    def n_atoms(self) -> int:
        return N_ATOMS

    @property
    def cavity_dim(self) -> int:
        return self.fock_cutoff + 1

    @property
    def dims(self) -> tuple:
        return (N_LEVELS, N_LEVELS, self.cavity_dim)

    @property
    def total_dim(self) -> int:
        return N_LEVELS * N_LEVELS * self.cavity_dim

    def index(self, s1, s2, n: int) -> int:
        """Basis index of ``|s1, s2, n>``; levels may be labels or integers."""
        s1, s2 = level_index(s1), level_index(s2)
        if not 0 <= n <= self.fock_cutoff:
            raise ValueError(f"photon number {n} outside 0..{self.fock_cutoff}")
        return (s1 * N_LEVELS + s2) * self.cavity_dim + n

    def labels(self, index: int) -> tuple:
        """Inverse of :meth:`index`, returning ``(s1, s2, n)`` as integers."""
        if not 0 <= index < self.total_dim:
            raise ValueError(f"index {index} outside 0..{self.total_dim - 1}")
        atoms, n = divmod(index, self.cavity_dim)
        s1, s2 = divmod(atoms, N_LEVELS)
        return s1, s2, n

    def photon_numbers(self) -> np.ndarray:
        """Photon number of every basis state, in index order."""
        return np.tile(np.arange(self.cavity_dim), N_LEVELS * N_LEVELS)


def level_index(level) -> int:
    if isinstance(level, str):
        try:
            return LEVELS.index(level)
        except ValueError:
            raise ValueError(f"unknown atomic level {level!r}; expected one of {LEVELS}") from None
    if isinstance(level, (int, np.integer)) and 0 <= level < N_LEVELS:
        return int(level)
    raise ValueError(f"unknown atomic level {level!r}")


def canonical(op) -> sp.csr_matrix:
    """Return ``op`` as a complex CSR matrix without duplicates or stored zeros."""
    out = sp.csr_matrix(op, dtype=complex, copy=True)
    out.sum_duplicates()
    out.eliminate_zeros()
    out.sort_indices()
    return out


def _embed(factors) -> sp.csr_matrix:
    return canonical(reduce(lambda x, y: sp.kron(x, y, format="csr"), factors))


def identity(space: HilbertSpace) -> sp.csr_matrix:
    return canonical(sp.identity(space.total_dim, dtype=complex, format="csr"))


def cavity_annihilation(fock_cutoff: int) -> sp.csr_matrix:
    """Single-mode ladder operator on ``n = 0 .. fock_cutoff``."""
    return canonical(sp.diags(np.sqrt(np.arange(1, fock_cutoff + 1)), 1, dtype=complex))


def annihilation(space: HilbertSpace) -> sp.csr_matrix:
    """Cavity annihilation operator ``a`` embedded in the composite space.

    The truncated operator is the exact top-left block of the infinite
    ladder operator, so ``[a, a^dag]`` equals the identity everywhere except
    in the ``n = N_c`` block.
    """
    if space.fock_cutoff < 1:
        raise ValueError("annihilation operator needs fock_cutoff >= 1")
    eye3 = sp.identity(N_LEVELS, dtype=complex, format="csr")
    return _embed([eye3, eye3, cavity_annihilation(space.fock_cutoff)])


def transition(alpha, beta) -> sp.csr_matrix:
    """Single-atom projector ``|alpha><beta|`` as a 3x3 matrix."""
    i, j = level_index(alpha), level_index(beta)
    return sp.csr_matrix(([1.0 + 0j], ([i], [j])), shape=(N_LEVELS, N_LEVELS))


def embed_atom(space: HilbertSpace, j: int, op) -> sp.csr_matrix:
    """Place a 3x3 single-atom operator on atom ``j`` (1 or 2)."""
    if j not in (1, 2):
        raise ValueError(f"atom index must be 1 or 2, got {j!r}")
    op = sp.csr_matrix(op, dtype=complex)
    if op.shape != (N_LEVELS, N_LEVELS):
        raise ValueError(f"single-atom operator must be 3x3, got {op.shape}")
    eye3 = sp.identity(N_LEVELS, dtype=complex, format="csr")
    factors = [eye3, eye3, sp.identity(space.cavity_dim, dtype=complex, format="csr")]
    factors[j - 1] = op
    return _embed(factors)


def embed_cavity(space: HilbertSpace, op) -> sp.csr_matrix:
    """Place a single-mode operator on the cavity factor."""
    op = sp.csr_matrix(op, dtype=complex)
    if op.shape != (space.cavity_dim, space.cavity_dim):
        raise ValueError(f"cavity operator must be {space.cavity_dim}x{space.cavity_dim}, got {op.shape}")
    eye3 = sp.identity(N_LEVELS, dtype=complex, format="csr")
    return _embed([eye3, eye3, op])


def atomic_operator(space: HilbertSpace, j: int, alpha, beta) -> sp.csr_matrix:
    """``S^j_{alpha beta} = |alpha>_j <beta|`` with identities elsewhere."""
    return embed_atom(space, j, transition(alpha, beta))


def _check_dims(*ops):
    shapes = {op.shape for op in ops}
    if len(shapes) != 1:
        raise ValueError(f"operator dimension mismatch: {sorted(shapes)}")
    shape = shapes.pop()
    if shape[0] != shape[1]:
        raise ValueError(f"operators must be square, got {shape}")


def dag(op) -> sp.csr_matrix:
    return canonical(sp.csr_matrix(op).conj().T)


def add(*ops) -> sp.csr_matrix:
    _check_dims(*ops)
    return canonical(reduce(lambda x, y: x + y, ops))


def scale(c, op) -> sp.csr_matrix:
    return canonical(complex(c) * sp.csr_matrix(op))


def mul(*ops) -> sp.csr_matrix:
    """Operator product, evaluated left to right."""
    _check_dims(*ops)
    return canonical(reduce(lambda x, y: x @ y, ops))


def commutator(a, b) -> sp.csr_matrix:
    _check_dims(a, b)
    return canonical(a @ b - b @ a)


def basis_ket(space: HilbertSpace, s1, s2, n: int) -> np.ndarray:
    ket = np.zeros(space.total_dim, dtype=complex)
    ket[space.index(s1, s2, n)] = 1.0
    return ket


# Two-atom collective states as (coefficient, level1, level2) terms.
_R2 = 1 / np.sqrt(2)
COLLECTIVE_STATES = {
    "gg": ((1.0, "g", "g"),),
    "M_g+": ((_R2, "m", "g"), (_R2, "g", "m")),
    "M_g-": ((_R2, "m", "g"), (-_R2, "g", "m")),
    "mm": ((1.0, "m", "m"),),
    "E_G+": ((_R2, "e", "g"), (_R2, "g", "e")),
    "E_G-": ((_R2, "e", "g"), (-_R2, "g", "e")),
    "E_M+": ((_R2, "e", "m"), (_R2, "m", "e")),
    "E_M-": ((_R2, "e", "m"), (-_R2, "m", "e")),
    "ee": ((1.0, "e", "e"),),
}

# Atomic excitation count (m and e each count once per atom).
COLLECTIVE_EXCITATIONS = {
    "gg": 0, "M_g+": 1, "M_g-": 1, "mm": 2,
    "E_G+": 1, "E_G-": 1, "E_M+": 2, "E_M-": 2, "ee": 2,
}


def collective_ket(space: HilbertSpace, label: str, n: int) -> np.ndarray:
    """Collective two-atom state ``|label, n>``, e.g. ``collective_ket(sp, "M_g+", 1)``."""
    try:
        terms = COLLECTIVE_STATES[label]
    except KeyError:
        raise ValueError(f"unknown collective state {label!r}") from None
    ket = np.zeros(space.total_dim, dtype=complex)
    for c, s1, s2 in terms:
        ket[space.index(s1, s2, n)] += c
    return ket


def swap_unitary(space: HilbertSpace) -> sp.csr_matrix:
    """Permutation exchanging the two atoms."""
    rows = np.arange(space.total_dim)
    cols = np.empty_like(rows)
    for i in rows:
        s1, s2, n = space.labels(i)
        cols[i] = space.index(s2, s1, n)
    return canonical(sp.csr_matrix((np.ones(space.total_dim, complex), (rows, cols)),
                                   shape=(space.total_dim,) * 2))


def parity_unitary(space: HilbertSpace) -> sp.csr_matrix:
    """Photon-number parity ``(-1)^(a^dag a)``."""
    return canonical(sp.diags((-1.0) ** space.photon_numbers()))
