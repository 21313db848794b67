# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Lindblad right-hand side and Dormand-Prince stepping loop.

The Hamiltonian is held in CSR form so the commutator costs
``O(nnz * D)``; every jump operator is a single transfer ``|dst><src|``
applied in ``O(D)``.  Inside :meth:`LindbladKernel.advance` all stage
states are Hermitian, which lets ``rho H`` be read off as ``(H rho)^+``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, sqrt

cnp.import_array()

# Dormand-Prince 5(4); row 6 doubles as the fifth-order weights
_TABLEAU = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0),
)
_ERROR = (71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

cdef double DP_A[7][7]
cdef double DP_E[7]
for _i, _row in enumerate(_TABLEAU):
    for _j in range(7):
        DP_A[_i][_j] = _row[_j] if _j < len(_row) else 0.0
for _j in range(7):
    DP_E[_j] = _ERROR[_j]


cdef inline double _clip(double f) noexcept nogil:
    if f < 0.2:
        return 0.2
    if f > 5.0:
        return 5.0
    return f


cdef inline double cabs(double complex z) noexcept nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef class LindbladKernel:
    cdef readonly Py_ssize_t dim
    cdef double complex[::1] row_data
    cdef Py_ssize_t[::1] row_ptr
    cdef Py_ssize_t[::1] row_idx
    cdef Py_ssize_t[::1] src
    cdef Py_ssize_t[::1] dst
    cdef double[::1] rates
    cdef double complex[:, :, ::1] ks
    cdef double complex[:, ::1] work
    cdef double complex[:, ::1] prod

    def __init__(self, hamiltonian, src, dst, rates):
        h = np.array(hamiltonian, dtype=np.complex128, order="C")
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("hamiltonian must be square")
        n = h.shape[0]
        self.dim = n
        rows, cols = np.nonzero(h)
        ptr = np.zeros(n + 1, dtype=np.intp)
        np.add.at(ptr, rows + 1, 1)
        self.row_ptr = np.cumsum(ptr).astype(np.intp)
        self.row_idx = cols.astype(np.intp)
        self.row_data = np.ascontiguousarray(h[rows, cols])
        self.src = np.ascontiguousarray(src, dtype=np.intp)
        self.dst = np.ascontiguousarray(dst, dtype=np.intp)
        self.rates = np.ascontiguousarray(rates, dtype=np.float64)
        if not (self.src.shape[0] == self.dst.shape[0] == self.rates.shape[0]):
            raise ValueError("src, dst and rates must have equal length")
        self.ks = np.zeros((7, n, n), dtype=np.complex128)
        self.work = np.zeros((n, n), dtype=np.complex128)
        self.prod = np.zeros((n, n), dtype=np.complex128)

    def apply(self, rho, out=None):
        """Return ``L(rho)`` for any square ``rho``; writes into ``out`` when given."""
        cdef double complex[:, ::1] r = np.ascontiguousarray(rho, dtype=np.complex128)
        if r.shape[0] != self.dim or r.shape[1] != self.dim:
            raise ValueError(f"rho has shape {np.shape(rho)}, expected ({self.dim}, {self.dim})")
        if out is None:
            out = np.empty((self.dim, self.dim), dtype=np.complex128)
        cdef double complex[:, ::1] o = out
        with nogil:
            self._general(r, o)
        return out

    cdef void _general(self, double complex[:, ::1] r, double complex[:, ::1] o) noexcept nogil:
        cdef Py_ssize_t n = self.dim, a, b, k, c
        cdef double complex hv, acc
        for a in range(n):
            for b in range(n):
                o[a, b] = 0
        for a in range(n):
            for k in range(self.row_ptr[a], self.row_ptr[a + 1]):
                c = self.row_idx[k]
                hv = self.row_data[k]
                for b in range(n):
                    o[a, b] = o[a, b] + hv * r[c, b]
        # rho H, row by row: (rho H)[a, b] = sum_c rho[a, c] H[c, b]
        for a in range(n):
            for c in range(n):
                acc = r[a, c]
                if acc == 0:
                    continue
                for k in range(self.row_ptr[c], self.row_ptr[c + 1]):
                    b = self.row_idx[k]
                    o[a, b] = o[a, b] - acc * self.row_data[k]
        for a in range(n):
            for b in range(n):
                acc = o[a, b]
                o[a, b] = acc.imag - 1j * acc.real
        self._dissipate(r, o)

    cdef void _dissipate(self, double complex[:, ::1] r, double complex[:, ::1] o) noexcept nogil:
        cdef Py_ssize_t n = self.dim, a, b, k, s, d
        cdef double g
        for k in range(self.rates.shape[0]):
            g = self.rates[k]
            if g == 0:
                continue
            s = self.src[k]
            d = self.dst[k]
            o[d, d] = o[d, d] + g * r[s, s]
            for b in range(n):
                o[s, b] = o[s, b] - 0.5 * g * r[s, b]
            for a in range(n):
                o[a, s] = o[a, s] - 0.5 * g * r[a, s]

    cdef void _hermitian(self, double complex[:, ::1] r, double complex[:, ::1] o) noexcept nogil:
        # valid for Hermitian r only
        cdef Py_ssize_t n = self.dim, a, b, k, c
        cdef double complex hv, x
        cdef double complex[:, ::1] p = self.prod
        for a in range(n):
            for b in range(n):
                p[a, b] = 0
            for k in range(self.row_ptr[a], self.row_ptr[a + 1]):
                c = self.row_idx[k]
                hv = self.row_data[k]
                for b in range(n):
                    p[a, b] = p[a, b] + hv * r[c, b]
        for a in range(n):
            for b in range(a, n):
                x = p[a, b] - p[b, a].conjugate()
                o[a, b] = x.imag - 1j * x.real
                o[b, a] = o[a, b].conjugate()
        self._dissipate(r, o)

    def advance(self, y_in, double t, double target, double h, double atol, double rtol, double h_min):
        """Integrate ``y`` (Hermitian, modified in place) from ``t`` to ``target``.

        The first stage derivative is cached between calls.  Returns
        ``(t, h, accepted, rejected, nfev, ok)``; ``ok`` is false when the
        step size fell below ``h_min`` (``y`` then holds the state at ``t``).
        """
        cdef double complex[:, ::1] y = y_in
        cdef double complex[:, ::1] w = self.work
        cdef double complex[:, :, ::1] ks = self.ks
        cdef Py_ssize_t n = self.dim, i, j, a, b
        cdef int accepted = 0, rejected = 0, nfev = 0, last, ok = 1
        cdef double hs, err, sc, e, fac, ya, wa, coef
        cdef double complex acc, ea
        if y.shape[0] != n or y.shape[1] != n:
            raise ValueError("state dimension mismatch")
        with nogil:
            if t == 0.0 or h < 0:
                self._hermitian(y, ks[0])
                nfev += 1
                if h < 0:
                    h = -h
            while t < target:
                last = h >= target - t
                hs = target - t if last else h
                for i in range(1, 7):
                    w[:, :] = y
                    for j in range(i):
                        coef = hs * DP_A[i][j]
                        if coef != 0:
                            for a in range(n):
                                for b in range(n):
                                    w[a, b] = w[a, b] + coef * ks[j, a, b]
                    self._hermitian(w, ks[i])
                    nfev += 1
                # w is the fifth-order solution; measure the embedded error
                err = 0
                for a in range(n):
                    for b in range(n):
                        ea = 0
                        for j in range(7):
                            if DP_E[j] != 0:
                                ea = ea + (hs * DP_E[j]) * ks[j, a, b]
                        ya = cabs(y[a, b])
                        wa = cabs(w[a, b])
                        sc = atol + rtol * (ya if ya > wa else wa)
                        e = cabs(ea) / sc
                        if e > err:
                            err = e
                if err <= 1.0:
                    accepted += 1
                    for a in range(n):
                        for b in range(a, n):
                            acc = 0.5 * (w[a, b] + w[b, a].conjugate())
                            y[a, b] = acc
                            y[b, a] = acc.conjugate()
                            acc = 0.5 * (ks[6, a, b] + ks[6, b, a].conjugate())
                            ks[0, a, b] = acc
                            ks[0, b, a] = acc.conjugate()
                    t = target if last else t + hs
                    fac = _clip(0.9 * pow(err, -0.2)) if err > 0 else 5.0
                    if not last or fac < 1:
                        h = hs * fac
                else:
                    rejected += 1
                    h = hs * _clip(0.9 * pow(err, -0.2))
                    if h < h_min:
                        ok = 0
                        break
        return t, h, accepted, rejected, nfev, bool(ok)
