"""Reservoir structure functions and their pseudomode parameters.

A structure function here is a weighted sum of Lorentzians

    D(w) = sum_m  w_m * G_m / ((w - wc_m)**2 + (G_m / 2)**2),

normalized so that its integral over the real line is 2*pi.  Each term
contributes one simple pole ``wc_m - i G_m / 2`` in the lower half plane,
and each pole becomes one pseudomode.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

#: Poles closer than this are merged into one pseudomode.
POLE_MERGE_TOL = 1e-12


class SpectralError(ValueError):
    pass


@dataclass(frozen=True)
class LorentzianTerm:
    weight: float
    center: float
    width: float


@dataclass(frozen=True)
class SpectralDensity:
    """Normalized sum of Lorentzian lines.

    Weights that do not sum to one are rescaled with a warning.
    """

    terms: tuple[LorentzianTerm, ...]

    def __post_init__(self):
        terms = tuple(t if isinstance(t, LorentzianTerm) else LorentzianTerm(*map(float, t))
                      for t in self.terms)
        if not terms:
            raise SpectralError("a spectral density needs at least one term")
        for t in terms:
            if not t.width > 0:
                raise SpectralError(f"Lorentzian width must be > 0, got {t.width}")
            if not t.weight >= 0:
                raise SpectralError(f"Lorentzian weight must be >= 0, got {t.weight}")
        total = sum(t.weight for t in terms)
        if not total > 0:
            raise SpectralError("spectral density is not normalizable (total weight is zero)")
        if abs(total - 1.0) > 1e-12:
            warnings.warn(f"spectral weights sum to {total:g}; rescaling to 1", stacklevel=3)
            terms = tuple(LorentzianTerm(t.weight / total, t.center, t.width) for t in terms)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def lorentzian(cls, omega_c: float, gamma: float) -> "SpectralDensity":
        return cls((LorentzianTerm(1.0, float(omega_c), float(gamma)),))

    @classmethod
    def sum_of_lorentzians(cls, terms) -> "SpectralDensity":
        """Build from ``[(weight, center, width), ...]``."""
        return cls(tuple(LorentzianTerm(*map(float, t)) for t in terms))

    @property
    def kind(self) -> str:
        return "lorentzian" if len(self.terms) == 1 else "sum"

    @property
    def max_width(self) -> float:
        return max(t.width for t in self.terms)

    @property
    def center(self) -> float:
        """Weighted mean line center."""
        return sum(t.weight * t.center for t in self.terms)

    def __call__(self, omega):
        return evaluate_density(self, omega)

    def window_weight(self, lo: float, hi: float) -> float:
        """Exact fraction of the normalized weight inside ``[lo, hi]``."""
        frac = 0.0
        for t in self.terms:
            a = np.arctan(2 * (hi - t.center) / t.width)
            b = np.arctan(2 * (lo - t.center) / t.width)
            frac += t.weight * (a - b) / np.pi
        return float(frac)


def evaluate_density(sd: SpectralDensity, omega):
    """Evaluate D(omega) on a scalar or array of real frequencies."""
    w = np.asarray(omega, dtype=float)
    out = np.zeros_like(w)
    for t in sd.terms:
        out += t.weight * t.width / ((w - t.center) ** 2 + (t.width / 2) ** 2)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PseudomodeModel:
    """Complex pseudomode frequencies and coupling factors.

    Attributes
    ----------
    poles : ndarray of complex
        Lower-half-plane poles ``z_l``; ``-Im z_l`` is half the pseudomode
        decay rate.
    residues : ndarray of complex
        Residues ``r_l`` of D at the poles.
    """

    poles: np.ndarray
    residues: np.ndarray

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.poles, dtype=complex))
        r = np.atleast_1d(np.asarray(self.residues, dtype=complex))
        if z.shape != r.shape or z.ndim != 1 or z.size == 0:
            raise SpectralError("poles and residues must be matching non-empty vectors")
        if np.any(z.imag > 0):
            raise SpectralError("pseudomode poles must lie in the closed lower half plane")
        z.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "poles", z)
        object.__setattr__(self, "residues", r)

    @classmethod
    def lossless(cls, omega_c: float) -> "PseudomodeModel":
        """Undamped single pseudomode, the zero-width limit of a Lorentzian."""
        return cls(np.array([complex(omega_c, 0.0)]), np.array([1j]))

    @property
    def n_modes(self) -> int:
        return self.poles.size

    @property
    def frequencies(self) -> np.ndarray:
        return self.poles.real

    @property
    def decay_rates(self) -> np.ndarray:
        """Lindblad rates ``-2 Im z_l``."""
        return -2.0 * self.poles.imag

    @property
    def weights(self) -> np.ndarray:
        """``-i r_l``; these sum to one."""
        return -1j * self.residues

    @property
    def coupling_factors(self) -> np.ndarray:
        """Principal square roots ``sqrt(-i r_l)``."""
        return np.sqrt(self.weights)

    def couplings(self, omega_big) -> np.ndarray:
        """Matrix ``g[i, l] = Omega_i * sqrt(-i r_l)`` for levels ``i``."""
        return np.outer(np.asarray(omega_big, dtype=float), self.coupling_factors)


def extract_pseudomodes(sd: SpectralDensity) -> PseudomodeModel:
    """Poles and residues of D in the lower half plane.

    Each Lorentzian term factors as ``w G / ((z - p)(z - conj p))`` with
    ``p = wc - i G / 2``; its residue at ``p`` is ``w G / (p - conj p) = i w``.
    The other terms are analytic at ``p`` unless they share the pole, in
    which case their residues add.  Zero-weight terms carry no pole.
    """
    poles: list[complex] = []
    residues: list[complex] = []
    for t in sd.terms:
        if t.weight == 0:
            continue
        p = complex(t.center, -t.width / 2)
        res = t.weight * t.width / (p - p.conjugate())
        for k, q in enumerate(poles):
            if abs(q - p) <= POLE_MERGE_TOL * max(1.0, abs(p)):
                residues[k] += res
                break
        else:
            poles.append(p)
            residues.append(res)
    if not poles:
        raise SpectralError("spectral density is not normalizable (no weighted poles)")
    model = PseudomodeModel(np.array(poles), np.array(residues))
    total = model.weights.sum()
    if abs(total - 1) > 1e-10:
        raise SpectralError(f"residue normalization violated: sum(-i r) = {total}")
    return model


def reconstruct_density(pm: PseudomodeModel, omega):
    """Rebuild D on the real axis from its lower-half-plane partial fractions.

    For a real D the upper-half-plane poles are conjugates with conjugate
    residues, so ``D(w) = 2 Re sum_l r_l / (w - z_l)``.
    """
    w = np.asarray(omega, dtype=float)[..., None]
    out = 2.0 * np.real(np.sum(pm.residues / (w - pm.poles), axis=-1))
    return out if out.ndim else float(out)


def kernel(pm: PseudomodeModel | SpectralDensity, omega_i: float, omega_j: float, dt):
    """Memory kernel ``G_ij(dt) = -i Omega_i Omega_j sum_l r_l exp(-i z_l dt)``."""
    if isinstance(pm, SpectralDensity):
        pm = extract_pseudomodes(pm)
    dt = np.asarray(dt, dtype=float)
    if np.any(dt < 0):
        raise ValueError("kernel is defined for dt >= 0")
    terms = pm.residues * np.exp(-1j * pm.poles * dt[..., None])
    out = -1j * omega_i * omega_j * terms.sum(axis=-1)
    return out if out.ndim else complex(out)
