"""XY-chain eigenbasis and the extended Hermitian Hamiltonian."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import MAX_DIMENSION, SpecError, StateIndex, SystemSpec, check_dimension, check_spec
from .spectral import PseudomodeModel


class Basis(str, Enum):
    SITE = "site"
    EIGEN = "eigen"


@dataclass(frozen=True)
class EigenBasis:
    """Sine-transform eigenmodes of an open XY chain of length M.

    ``u[l-1, i-1] = sqrt(2/(M+1)) sin(i q_l)`` with ``q_l = pi l/(M+1)``;
    row ``l`` holds the site amplitudes of eigenmode ``l``.  The matrix is
    symmetric and orthogonal.
    """

    u: np.ndarray
    energies: np.ndarray

    @property
    def size(self) -> int:
        return self.energies.size


def build_eigenbasis(chain_len: int, omega0: float, j_coupling: float) -> EigenBasis:
    if chain_len < 1:
        raise SpecError("chain length must be >= 1")
    m = int(chain_len)
    k = np.arange(1, m + 1)
    q = np.pi * k / (m + 1)
    u = np.sqrt(2.0 / (m + 1)) * np.sin(np.outer(q, k))
    energies = omega0 + 2.0 * j_coupling * np.cos(q)
    return EigenBasis(u, energies)


def chain_hamiltonian(chain_len: int, omega0: float, j_coupling: float) -> np.ndarray:
    h = omega0 * np.eye(chain_len)
    off = np.full(chain_len - 1, j_coupling)
    return h + np.diag(off, 1) + np.diag(off, -1)


@dataclass(frozen=True)
class ExtendedHamiltonian:
    """Hermitian matrix over the extended single-excitation space."""

    matrix: np.ndarray
    basis: Basis
    index: StateIndex

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_csv(self, path) -> None:
        """Dump every entry row-major as ``row,col,re,im``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "col", "re", "im"])
            for (i, j), v in np.ndenumerate(self.matrix):
                w.writerow([i, j, repr(float(v.real)), repr(float(v.imag))])


def _prepare(spec: SystemSpec, pm: PseudomodeModel, cap: int) -> tuple[StateIndex, np.ndarray]:
    check_spec(spec)
    index = StateIndex.for_spec(spec, pm.n_modes)
    check_dimension(index.dim, cap)
    g = pm.couplings(spec.omega_big)
    if np.any(np.abs(g.imag) > 1e-12 * max(1.0, np.abs(g).max())):
        raise SpecError("complex pseudomode couplings cannot be represented by a Hermitian Hamiltonian")
    h = np.zeros((index.dim, index.dim), dtype=complex)
    pm_idx = np.arange(index.pseudomode_slice.start, index.pseudomode_slice.stop)
    h[pm_idx, pm_idx] = pm.frequencies
    return index, h


def _attach(h: np.ndarray, rows, pm_idx, couplings) -> None:
    h[np.ix_(rows, pm_idx)] += couplings
    h[np.ix_(pm_idx, rows)] += couplings.conj().T


def build_site_hamiltonian(spec: SystemSpec, pm: PseudomodeModel,
                           cap: int = MAX_DIMENSION) -> ExtendedHamiltonian:
    """Extended Hamiltonian in the site basis.

    Site ``l`` of chain ``j`` couples to pseudomode ``k`` with strength
    ``Omega_j sqrt(-i r_k) u[r-1, l-1]``, so that in the eigenbasis only mode
    ``r`` of each chain sees the reservoir.
    """
    index, h = _prepare(spec, pm, cap)
    block = chain_hamiltonian(spec.chain_len, spec.omega0, spec.j_coupling)
    u_r = build_eigenbasis(spec.chain_len, spec.omega0, spec.j_coupling).u[spec.r_index - 1]
    g = pm.couplings(spec.omega_big).real
    pm_idx = np.arange(index.pseudomode_slice.start, index.pseudomode_slice.stop)
    for j in range(1, spec.n_chains + 1):
        sl = index.chain_slice(j)
        h[sl, sl] = block
        rows = np.arange(sl.start, sl.stop)
        _attach(h, rows, pm_idx, np.outer(u_r, g[j - 1]))
    return ExtendedHamiltonian(h, Basis.SITE, index)


def build_eigen_hamiltonian(spec: SystemSpec, pm: PseudomodeModel,
                            cap: int = MAX_DIMENSION) -> ExtendedHamiltonian:
    """Extended Hamiltonian in the chain eigenbasis (index layout unchanged)."""
    index, h = _prepare(spec, pm, cap)
    eb = build_eigenbasis(spec.chain_len, spec.omega0, spec.j_coupling)
    g = pm.couplings(spec.omega_big).real
    pm_idx = np.arange(index.pseudomode_slice.start, index.pseudomode_slice.stop)
    for j in range(1, spec.n_chains + 1):
        sl = index.chain_slice(j)
        h[sl, sl] = np.diag(eb.energies)
        row = np.array([index.site(j, spec.r_index)])
        _attach(h, row, pm_idx, g[j - 1][None, :])
    return ExtendedHamiltonian(h, Basis.EIGEN, index)


def basis_transform(index: StateIndex, basis: EigenBasis) -> np.ndarray:
    """Orthogonal T with columns = eigenmodes; identity outside the chains."""
    if basis.size != index.chain_len:
        raise SpecError(f"eigenbasis of size {basis.size} does not match chain length {index.chain_len}")
    t = np.eye(index.dim)
    for j in range(1, index.n_chains + 1):
        sl = index.chain_slice(j)
        t[sl, sl] = basis.u.T
    return t


def change_of_basis(h: ExtendedHamiltonian, basis: EigenBasis) -> ExtendedHamiltonian:
    """Site -> eigen (``T^T H T``) or eigen -> site (``T H T^T``)."""
    t = basis_transform(h.index, basis)
    if h.basis is Basis.SITE:
        return ExtendedHamiltonian(t.T @ h.matrix @ t, Basis.EIGEN, h.index)
    return ExtendedHamiltonian(t @ h.matrix @ t.T, Basis.SITE, h.index)


def decoupled_modes(h: ExtendedHamiltonian, atol: float = 1e-12) -> list[int]:
    """Chain rows of an eigen-basis Hamiltonian with no pseudomode coupling."""
    if h.basis is not Basis.EIGEN:
        raise ValueError("decoupled modes are defined in the eigen basis")
    idx = h.index
    block = h.matrix[idx.site_slice, idx.pseudomode_slice]
    rows = np.flatnonzero(np.all(np.abs(block) <= atol, axis=1))
    return [int(r) + 1 for r in rows]
