"""Density-matrix time stepping for a LindbladGenerator.

The production path is the Dormand-Prince 5(4) embedded pair with
per-entry error control, run inside the generator's kernel (compiled when
available).  Step sizes are clipped so that every sample time is hit
exactly; no interpolation is involved.  If the adaptive step collapses the
remaining window is finished with fixed-step RK4.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from ..model import RunConfig, StateIndex
from ..observables import TimeSeries
from .generator import LindbladGenerator

log = logging.getLogger(__name__)

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-9
POSITIVITY_TOL = 1e-7
#: A sample beyond ``ABORT_FACTOR`` times a tolerance aborts the run.
ABORT_FACTOR = 10.0


class InvariantError(RuntimeError):
    """A sampled state left the physical set by more than the abort margin."""


@dataclass
class ExtendedState:
    rho: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.rho = np.array(self.rho, dtype=complex)
        if self.rho.ndim != 2 or self.rho.shape[0] != self.rho.shape[1]:
            raise ValueError("rho must be a square matrix")

    @classmethod
    def site_excitation(cls, index: StateIndex, chain: int = 1, pos: int = 1) -> "ExtendedState":
        rho = np.zeros((index.dim, index.dim), dtype=complex)
        k = index.site(chain, pos)
        rho[k, k] = 1.0
        return cls(rho)

    @classmethod
    def pure(cls, vec) -> "ExtendedState":
        v = np.asarray(vec, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    def diagnostics(self) -> tuple[float, float, float]:
        """Trace error, Hermiticity error and smallest eigenvalue."""
        rho = self.rho
        trace_err = abs(np.trace(rho) - 1.0)
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        mineig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        return trace_err, herm, mineig

    def violations(self, factor: float = 1.0) -> list[str]:
        tr, herm, mineig = self.diagnostics()
        out = []
        if tr > factor * TRACE_TOL:
            out.append(f"trace error {tr:.3e}")
        if herm > factor * HERMITIAN_TOL:
            out.append(f"Hermiticity error {herm:.3e}")
        if mineig < -factor * POSITIVITY_TOL:
            out.append(f"smallest eigenvalue {mineig:.3e}")
        return out


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _rk4_step(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def _initial_step(y, f0, span, atol) -> float:
    d0 = np.max(np.abs(y)) + atol
    d1 = np.max(np.abs(f0)) + atol
    return float(min(0.01 * d0 / d1, span))


def integrate(gen: LindbladGenerator, rho0, run: RunConfig, keep_states: bool = False,
              check_invariants: bool = True) -> TimeSeries:
    """Evolve ``rho0`` and sample ``run.sample_count`` equally spaced times.

    Every sample is checked against the ExtendedState tolerances; a sample
    beyond ten times a tolerance raises :class:`InvariantError`.
    """
    state = rho0 if isinstance(rho0, ExtendedState) else ExtendedState(rho0)
    if state.rho.shape != (gen.dim, gen.dim):
        raise ValueError(f"initial state has shape {state.rho.shape}, generator dimension is {gen.dim}")
    if check_invariants:
        bad = state.violations()
        if bad:
            raise InvariantError("initial state: " + ", ".join(bad))

    times = run.times
    n = times.size
    dim = gen.dim
    pops = np.empty((n, dim))
    purity = np.empty(n)
    trace_err = np.empty(n)
    herm_err = np.empty(n)
    min_eig = np.empty(n)
    states = np.empty((n, dim, dim), dtype=complex) if keep_states else None

    kern = gen.kernel
    y = np.ascontiguousarray(_hermitize(state.rho))
    t = 0.0
    stats = {"accepted": 0, "rejected": 0, "nfev": 0, "rk4_steps": 0}

    def record(k, y):
        tr, herm, me = ExtendedState(y).diagnostics() if check_invariants else (abs(np.trace(y) - 1), 0.0, 0.0)
        pops[k] = y.diagonal().real
        purity[k] = float(np.real(np.vdot(y.conj().T, y)))
        trace_err[k] = tr
        herm_err[k] = herm
        min_eig[k] = me
        if states is not None:
            states[k] = y
        if check_invariants:
            bad = []
            if tr > ABORT_FACTOR * TRACE_TOL:
                bad.append(f"trace error {tr:.3e}")
            if herm > ABORT_FACTOR * HERMITIAN_TOL:
                bad.append(f"Hermiticity error {herm:.3e}")
            if me < -ABORT_FACTOR * POSITIVITY_TOL:
                bad.append(f"smallest eigenvalue {me:.3e}")
            if bad:
                raise InvariantError(f"t = {times[k]:.6g}: " + ", ".join(bad))

    record(0, y)
    method = run.method
    h_min = 1e-12 * run.t_final
    # negative step asks the kernel to refresh its cached first stage
    h = -_initial_step(y, gen(y), times[1] - times[0], run.abs_tol)

    for k in range(1, n):
        target = times[k]
        if method == "adaptive":
            t, h, acc, rej, nfev, ok = kern.advance(y, t, target, h, run.abs_tol, run.rel_tol, h_min)
            stats["accepted"] += acc
            stats["rejected"] += rej
            stats["nfev"] += nfev
            if not ok:
                warnings.warn(f"adaptive step collapsed at t = {t:.6g}; finishing with fixed-step RK4",
                              RuntimeWarning, stacklevel=2)
                method = "rk4"
        while t < target:
            hs = min(run.rk4_step, target - t)
            if target - t - hs < 1e-12 * run.t_final:
                hs = target - t
            y = np.ascontiguousarray(_hermitize(_rk4_step(gen, y, hs)))
            stats["rk4_steps"] += 1
            stats["nfev"] += 4
            t = target if hs == target - t else t + hs
        record(k, y)

    log.debug("integrate: %s", stats)
    idx = gen.index
    sink = next((d for d in gen.dissipators if d.dst == idx.sink), None)
    return TimeSeries(
        times=times, populations=pops, index=idx, purity=purity, trace_error=trace_err,
        hermiticity_error=herm_err, min_eigenvalue=min_eig, states=states,
        sink_rate=sink.rate if sink else 0.0, sink_source=sink.src if sink else None,
        meta={"method": method, **stats},
    )
