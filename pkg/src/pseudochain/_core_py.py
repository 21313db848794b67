"""Pure-numpy Lindblad kernel; same interface and stepping rules as the compiled core."""

from __future__ import annotations

import numpy as np

_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


class LindbladKernel:
    def __init__(self, hamiltonian, src, dst, rates):
        self.h = np.ascontiguousarray(hamiltonian, dtype=np.complex128)
        if self.h.ndim != 2 or self.h.shape[0] != self.h.shape[1]:
            raise ValueError("hamiltonian must be square")
        self.dim = self.h.shape[0]
        self.src = np.asarray(src, dtype=np.intp)
        self.dst = np.asarray(dst, dtype=np.intp)
        self.rates = np.asarray(rates, dtype=float)
        if not (self.src.shape == self.dst.shape == self.rates.shape):
            raise ValueError("src, dst and rates must have equal length")
        self._k1 = None

    def apply(self, rho, out=None):
        rho = np.asarray(rho, dtype=np.complex128)
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"rho has shape {rho.shape}, expected ({self.dim}, {self.dim})")
        res = self.h @ rho
        res -= rho @ self.h
        res *= -1j
        for s, d, g in zip(self.src, self.dst, self.rates):
            if g == 0:
                continue
            res[d, d] += g * rho[s, s]
            res[s, :] -= 0.5 * g * rho[s, :]
            res[:, s] -= 0.5 * g * rho[:, s]
        if out is None:
            return res
        out[...] = res
        return out

    def advance(self, y, t, target, h, atol, rtol, h_min):
        """See the compiled core: in-place Dormand-Prince from ``t`` to ``target``."""
        accepted = rejected = nfev = 0
        if t == 0.0 or h < 0 or self._k1 is None:
            self._k1 = self.apply(y)
            nfev += 1
            h = abs(h)
        while t < target:
            last = h >= target - t
            hs = target - t if last else h
            ks = [self._k1]
            for i in range(1, 7):
                w = y.copy()
                for a, k in zip(_A[i], ks):
                    if a:
                        w += (hs * a) * k
                ks.append(self.apply(w))
                nfev += 1
            err_m = sum((hs * e) * k for e, k in zip(_E, ks) if e)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(w))
            err = float(np.max(np.abs(err_m) / scale))
            if err <= 1.0:
                accepted += 1
                y[...] = 0.5 * (w + w.conj().T)
                self._k1 = 0.5 * (ks[6] + ks[6].conj().T)
                t = target if last else t + hs
                fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                if not last or fac < 1:
                    h = hs * fac
            else:
                rejected += 1
                h = hs * max(0.2, 0.9 * err ** -0.2)
                if h < h_min:
                    return t, h, accepted, rejected, nfev, False
        return t, h, accepted, rejected, nfev, True
