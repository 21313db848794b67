"""User-facing specifications and the single-excitation state indexing.

All frequencies are in units of the two-level transition frequency
``omega0`` and all times in units of ``1/omega0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

#: Largest extended-space dimension accepted by the dense builders.
MAX_DIMENSION = 4096

DEFAULT_OMEGA = 0.15


class SpecError(ValueError):
    """Raised when a specification violates one of its invariants."""


@dataclass(frozen=True)
class SystemSpec:
    """N identical XY chains of M sites sharing one reservoir.

    Chain 1 is the transport channel; chains 2..N are auxiliary.

    Parameters
    ----------
    n_chains : int
        Number of chains N.
    chain_len : int
        Sites per chain M.
    omega0 : float
        On-site transition frequency.
    j_coupling : float
        Nearest-neighbour XY exchange J. The default 0.1 is a modelling
        choice, not a value taken from any reference figure.
    r_index : int
        Which chain eigenmode (1-based) couples to the reservoir.
    omega_big : tuple of float
        Per-chain collective coupling to the reservoir. A scalar is
        broadcast to every chain; ``None`` means 0.15 on every chain.
    """

    n_chains: int = 1
    chain_len: int = 3
    omega0: float = 1.0
    j_coupling: float = 0.1
    r_index: int = 1
    omega_big: tuple[float, ...] | float | None = None

    def __post_init__(self):
        om = DEFAULT_OMEGA if self.omega_big is None else self.omega_big
        if np.isscalar(om):
            om = (float(om),) * max(int(self.n_chains), 1)
        object.__setattr__(self, "omega_big", tuple(float(x) for x in om))

    @classmethod
    def uniform(cls, n_chains: int, chain_len: int, omega_coupling: float = 0.15, **kwargs) -> "SystemSpec":
        """Spec with the same reservoir coupling on every chain."""
        return cls(n_chains=n_chains, chain_len=chain_len,
                   omega_big=(float(omega_coupling),) * n_chains, **kwargs)

    @property
    def n_sites(self) -> int:
        return self.n_chains * self.chain_len


@dataclass(frozen=True)
class SinkSpec:
    """Irreversible trap fed from one site of the channel (chain 1).

    ``attach_site=None`` means the last site of the channel.
    """

    gamma_sink: float = 0.6
    attach_site: int | None = None

    def site(self, spec: SystemSpec) -> int:
        return spec.chain_len if self.attach_site is None else self.attach_site


@dataclass(frozen=True)
class RunConfig:
    """Integration window and tolerances.

    ``method`` selects the adaptive embedded pair (``"adaptive"``) or the
    fixed-step fourth-order scheme (``"rk4"``, step ``rk4_step``).
    """

    t_final: float = 200.0
    sample_count: int = 401
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    initial_site: int = 1
    method: str = "adaptive"
    rk4_step: float = 0.01

    def __post_init__(self):
        problems = []
        if not self.t_final > 0:
            problems.append("t_final must be positive")
        if int(self.sample_count) != self.sample_count or self.sample_count < 2:
            problems.append("sample_count must be an integer >= 2")
        for name in ("abs_tol", "rel_tol"):
            v = getattr(self, name)
            if not 0 < v < 1:
                problems.append(f"{name} must lie in (0, 1)")
        if self.method not in ("adaptive", "rk4"):
            problems.append(f"unknown method {self.method!r}")
        if not self.rk4_step > 0:
            problems.append("rk4_step must be positive")
        if problems:
            raise SpecError("; ".join(problems))

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, int(self.sample_count))


@dataclass(frozen=True)
class StateIndex:
    """Canonical enumeration of the single-excitation extended space.

    Index 0 is the global ground state, indices ``1..N*M`` are the sites
    (``(j-1)*M + l`` for site ``l`` of chain ``j``), then one index per
    pseudomode, and the sink last.
    """

    n_chains: int
    chain_len: int
    n_pseudomodes: int = 1

    @classmethod
    def for_spec(cls, spec: SystemSpec, n_pseudomodes: int = 1) -> "StateIndex":
        return cls(spec.n_chains, spec.chain_len, n_pseudomodes)

    @property
    def n_sites(self) -> int:
        return self.n_chains * self.chain_len

    @property
    def dim(self) -> int:
        return self.n_sites + self.n_pseudomodes + 2

    ground = 0

    @property
    def sink(self) -> int:
        return self.dim - 1

    def site(self, chain: int, pos: int) -> int:
        if not (1 <= chain <= self.n_chains and 1 <= pos <= self.chain_len):
            raise IndexError(f"site ({chain}, {pos}) outside {self.n_chains}x{self.chain_len}")
        return (chain - 1) * self.chain_len + pos

    def decode(self, index: int) -> tuple[int, int]:
        if not 1 <= index <= self.n_sites:
            raise IndexError(f"index {index} is not a site index")
        chain, pos = divmod(index - 1, self.chain_len)
        return chain + 1, pos + 1

    def pseudomode(self, k: int) -> int:
        if not 1 <= k <= self.n_pseudomodes:
            raise IndexError(f"pseudomode {k} out of range")
        return self.n_sites + k

    def chain_slice(self, chain: int) -> slice:
        start = self.site(chain, 1)
        return slice(start, start + self.chain_len)

    @property
    def site_slice(self) -> slice:
        return slice(1, 1 + self.n_sites)

    @property
    def pseudomode_slice(self) -> slice:
        return slice(1 + self.n_sites, 1 + self.n_sites + self.n_pseudomodes)

    def labels(self) -> list[str]:
        return (["p_ground"]
                + [f"p_site_{i}" for i in range(1, self.n_sites + 1)]
                + [f"p_pm_{k}" for k in range(1, self.n_pseudomodes + 1)]
                + ["p_sink"])


def validate_spec(spec: SystemSpec, sink: SinkSpec | None = None) -> list[str]:
    """Return every violated invariant as a message; empty when valid."""
    report = []
    if int(spec.n_chains) != spec.n_chains or spec.n_chains < 1:
        report.append("n_chains must be a positive integer")
    if int(spec.chain_len) != spec.chain_len or spec.chain_len < 1:
        report.append("chain_len must be a positive integer")
    if not 1 <= spec.r_index <= max(spec.chain_len, 1):
        report.append("r_index out of range")
    if len(spec.omega_big) != spec.n_chains:
        report.append("omega_big length mismatch")
    if any(not w >= 0 for w in spec.omega_big):
        report.append("omega_big entries must be >= 0")
    if not np.isfinite(spec.omega0) or not np.isfinite(spec.j_coupling):
        report.append("omega0 and j_coupling must be finite")
    if sink is not None:
        if not sink.gamma_sink >= 0:
            report.append("gamma_sink must be >= 0")
        site = sink.site(spec)
        if not 1 <= site <= spec.chain_len:
            report.append("attach_site out of range")
    return report


def check_spec(spec: SystemSpec, sink: SinkSpec | None = None) -> None:
    report = validate_spec(spec, sink)
    if report:
        raise SpecError("; ".join(report))


def state_dimension(spec: SystemSpec, n_pseudomodes: int) -> int:
    """Dimension ``N*M + P + 2`` of the extended single-excitation space."""
    check_spec(spec)
    if n_pseudomodes < 1:
        raise SpecError("n_pseudomodes must be >= 1")
    return spec.n_sites + n_pseudomodes + 2


def check_dimension(dim: int, cap: int = MAX_DIMENSION) -> None:
    if dim > cap:
        raise SpecError(f"extended dimension {dim} exceeds the dimension cap {cap}")


def site_vector(index: StateIndex, chain: int, pos: int) -> np.ndarray:
    v = np.zeros(index.dim, dtype=complex)
    v[index.site(chain, pos)] = 1.0
    return v


def projector(vec: Sequence[complex]) -> np.ndarray:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())
