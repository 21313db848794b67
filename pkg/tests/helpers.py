"""Independent reference implementations shared by the tests."""

import numpy as np
from scipy.linalg import expm


def dense_lindblad_rhs(h, jumps, rho):
    """Generator from dense matrix products; ``jumps`` holds (rate, L) pairs."""
    out = -1j * (h @ rho - rho @ h)
    for rate, op in jumps:
        ld = op.conj().T
        out += rate * (op @ rho @ ld - 0.5 * (ld @ op @ rho + rho @ ld @ op))
    return out


def liouvillian(h, jumps):
    """Row-major superoperator so that vec(drho/dt) = L vec(rho)."""
    d = h.shape[0]
    eye = np.eye(d)
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for rate, op in jumps:
        ldl = op.conj().T @ op
        sup += rate * (np.kron(op, op.conj()) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T))
    return sup


def propagate_exact(h, jumps, rho0, times):
    """rho(t) by matrix exponential of the dense Liouvillian."""
    d = h.shape[0]
    sup = liouvillian(h, jumps)
    v0 = rho0.reshape(-1)
    return np.array([(expm(sup * t) @ v0).reshape(d, d) for t in times])


def random_density(dim, rng, rank=None):
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


#: One formatted line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE_LINES: dict[int, str] = {}
