"""Lindblad generator of the extended chains + pseudomodes + sink system."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..kernels import LindbladKernel
from ..model import SinkSpec, SpecError, StateIndex
from ..spectral import PseudomodeModel
from ..system import Basis, ExtendedHamiltonian


@dataclass(frozen=True)
class Dissipator:
    """Jump ``sqrt(rate) |dst><src|``."""

    rate: float
    src: int
    dst: int
    label: str = ""

    def operator(self, dim: int) -> np.ndarray:
        op = np.zeros((dim, dim), dtype=complex)
        op[self.dst, self.src] = 1.0
        return op

    @property
    def jump(self):
        return self.src, self.dst


@dataclass(frozen=True)
class LindbladGenerator:
    hamiltonian: ExtendedHamiltonian
    dissipators: tuple[Dissipator, ...]
    _kernel: LindbladKernel = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for d in self.dissipators:
            if not d.rate >= 0:
                raise SpecError(f"dissipator {d.label!r} has negative rate {d.rate}")
        object.__setattr__(self, "_kernel", LindbladKernel(
            self.hamiltonian.matrix,
            [d.src for d in self.dissipators],
            [d.dst for d in self.dissipators],
            [d.rate for d in self.dissipators],
        ))

    @property
    def index(self) -> StateIndex:
        return self.hamiltonian.index

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    @property
    def kernel(self) -> LindbladKernel:
        return self._kernel

    def jump_operators(self) -> list[tuple[float, np.ndarray]]:
        """``(rate, L)`` pairs with L as dense matrices."""
        return [(d.rate, d.operator(self.dim)) for d in self.dissipators]

    def __call__(self, rho, out=None):
        return self._kernel.apply(rho, out)


def build_generator(h: ExtendedHamiltonian, pm: PseudomodeModel,
                    sink: SinkSpec | None) -> LindbladGenerator:
    """One decay channel per pseudomode (rate ``-2 Im z_l``, into the ground
    state) plus the sink channel from the attachment site of chain 1.

    ``sink=None`` omits the sink channel; the sink index still exists.
    """
    idx = h.index
    if pm.n_modes != idx.n_pseudomodes:
        raise SpecError("pseudomode count differs between Hamiltonian and model")
    if sink is not None and h.basis is not Basis.SITE:
        raise SpecError("the sink channel is site-local; build the generator from a site-basis Hamiltonian")
    diss = [Dissipator(float(rate), idx.pseudomode(k + 1), idx.ground, f"pseudomode_{k + 1}")
            for k, rate in enumerate(pm.decay_rates)]
    if sink is not None:
        site = sink.attach_site or idx.chain_len
        diss.append(Dissipator(float(sink.gamma_sink), idx.site(1, site), idx.sink, "sink"))
    return LindbladGenerator(h, tuple(diss))


def apply_generator(gen: LindbladGenerator, rho) -> np.ndarray:
    """``-i[H, rho] + sum_k rate_k (L rho L^+ - {L^+ L, rho}/2)``."""
    rho = np.asarray(rho)
    if rho.shape != (gen.dim, gen.dim):
        raise ValueError(f"rho has shape {rho.shape}, generator acts on dimension {gen.dim}")
    return gen(rho)
