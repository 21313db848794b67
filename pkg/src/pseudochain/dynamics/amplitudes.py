"""Pseudomode amplitude equations in the chain eigenbasis.

Solves ``i dc/dt = E c + g s`` and ``i ds/dt = z s + g^T c`` with complex
pseudomode frequencies ``z``.  This is the Schrödinger-picture counterpart
of the Lindblad evolution without a sink and is used to cross-check it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from ..model import RunConfig, SinkSpec, SpecError, StateIndex, SystemSpec, check_spec
from ..observables import TimeSeries
from ..spectral import PseudomodeModel
from ..system import basis_transform, build_eigenbasis


@dataclass
class AmplitudeState:
    """Eigenmode amplitudes ``c`` (N*M, StateIndex site order), pseudomode
    amplitudes ``s`` and the constant ground amplitude ``c0``."""

    c: np.ndarray
    s: np.ndarray
    c0: complex = 0.0

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=complex)
        self.s = np.asarray(self.s, dtype=complex)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.c, self.c).real + np.vdot(self.s, self.s).real + abs(self.c0) ** 2)

    @classmethod
    def from_site(cls, spec: SystemSpec, site_amplitudes, n_pseudomodes: int = 1, c0: complex = 0.0):
        """Express site-basis chain amplitudes in the eigenbasis."""
        eb = build_eigenbasis(spec.chain_len, spec.omega0, spec.j_coupling)
        idx = StateIndex.for_spec(spec, n_pseudomodes)
        t = basis_transform(idx, eb)[idx.site_slice, idx.site_slice]
        return cls(t.T @ np.asarray(site_amplitudes, dtype=complex), np.zeros(n_pseudomodes), c0)

    @classmethod
    def site_excitation(cls, spec: SystemSpec, chain: int = 1, pos: int = 1, n_pseudomodes: int = 1):
        v = np.zeros(spec.n_sites, dtype=complex)
        v[StateIndex.for_spec(spec).site(chain, pos) - 1] = 1.0
        return cls.from_site(spec, v, n_pseudomodes)


def amplitude_matrix(spec: SystemSpec, pm: PseudomodeModel) -> np.ndarray:
    """Non-Hermitian generator ``K`` with ``i dx/dt = K x``, ``x = (c, s)``."""
    eb = build_eigenbasis(spec.chain_len, spec.omega0, spec.j_coupling)
    n, p = spec.n_sites, pm.n_modes
    k = np.zeros((n + p, n + p), dtype=complex)
    k[np.arange(n), np.arange(n)] = np.tile(eb.energies, spec.n_chains)
    k[np.arange(n, n + p), np.arange(n, n + p)] = pm.poles
    g = pm.couplings(spec.omega_big)
    for j in range(spec.n_chains):
        row = j * spec.chain_len + spec.r_index - 1
        k[row, n:] = g[j]
        k[n:, row] = g[j]
    return k


def integrate_amplitudes(spec: SystemSpec, pm: PseudomodeModel, a0: AmplitudeState, run: RunConfig,
                         sink: SinkSpec | None = None) -> TimeSeries:
    """Evolve the amplitudes and report populations in the site-basis layout.

    Chain amplitudes are mapped back to sites; norm lost through pseudomode
    damping is booked on the ground state, as in the Lindblad picture.
    """
    if sink is not None and sink.gamma_sink != 0:
        raise SpecError("the amplitude equations have no sink channel; use gamma_sink = 0")
    check_spec(spec)
    idx = StateIndex.for_spec(spec, pm.n_modes)
    n = spec.n_sites
    if a0.c.shape != (n,) or a0.s.shape != (pm.n_modes,):
        raise ValueError("amplitude state does not match the system dimensions")
    k = amplitude_matrix(spec, pm)
    minus_ik = -1j * k
    x0 = np.concatenate([a0.c, a0.s])
    times = run.times
    sol = solve_ivp(lambda t, x: minus_ik @ x, (0.0, run.t_final), x0, method="DOP853",
                    t_eval=times, rtol=run.rel_tol, atol=run.abs_tol)
    if not sol.success:
        raise RuntimeError(f"amplitude integration failed: {sol.message}")
    x = sol.y.T

    t_mat = basis_transform(idx, build_eigenbasis(spec.chain_len, spec.omega0, spec.j_coupling))
    to_site = t_mat[idx.site_slice, idx.site_slice]
    sites = np.abs(x[:, :n] @ to_site.T) ** 2
    modes = np.abs(x[:, n:]) ** 2
    excited0 = a0.norm2 - abs(a0.c0) ** 2
    pops = np.zeros((times.size, idx.dim))
    pops[:, idx.site_slice] = sites
    pops[:, idx.pseudomode_slice] = modes
    pops[:, idx.ground] = abs(a0.c0) ** 2 + excited0 - sites.sum(axis=1) - modes.sum(axis=1)
    total = pops.sum(axis=1)
    return TimeSeries(times, pops, idx, purity=np.full(times.size, np.nan),
                      trace_error=np.abs(total - a0.norm2),
                      meta={"solver": "amplitudes", "nfev": int(sol.nfev), "norm": total})
