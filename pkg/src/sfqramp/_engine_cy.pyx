# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled schedule-cost engine; hot kernel behind the ramp optimizer.

Same contract and algorithm as the pure-Python twin in _engine_py: ramp
propagators built kick by kick, then the exhaustive train-length scan runs
over the eigenbasis of the unitary one-period train step, where the
projected trace is a short geometric series. All matrices are small
(n_levels x n_levels, typically 6x6), so plain nested loops beat BLAS
dispatch overhead by a wide margin.
"""

import numpy as np

cimport cython
from libc.math cimport cos, sin


cdef inline void _matmul(double complex[:, ::1] a, double complex[:, ::1] b,
                         double complex[:, ::1] out, int dim) noexcept nogil:
    cdef int i, j, k
    cdef double complex acc
    for i in range(dim):
        for j in range(dim):
            acc = 0
            for k in range(dim):
                acc = acc + a[i, k] * b[k, j]
            out[i, j] = acc


cdef inline void _copy(double complex[:, ::1] src, double complex[:, ::1] dst,
                       int dim) noexcept nogil:
    cdef int i, j
    for i in range(dim):
        for j in range(dim):
            dst[i, j] = src[i, j]


cdef class CompiledScheduleEngine:
    """Evaluates mirrored-schedule process infidelity for one gate setup."""

    cdef readonly int nt_max
    cdef readonly double period
    cdef int dim
    cdef double[::1] omegas
    cdef double complex[:, ::1] kick, u_targ_dag, p, p_inv
    cdef double complex[::1] lam
    cdef double complex[:, ::1] u_on, u_off, v, scratch
    cdef double complex[::1] coeff, powers
    cdef double[::1] gaps

    is_compiled = True

    def __init__(self, omegas, kick, u_targ, period, nt_max):
        omegas = np.asarray(omegas, dtype=np.float64)
        kick = np.asarray(kick, dtype=np.complex128)
        self.omegas = omegas.copy()
        self.dim = self.omegas.shape[0]
        self.kick = kick.copy(order="C")
        u_targ = np.asarray(u_targ, dtype=np.complex128)
        self.u_targ_dag = np.ascontiguousarray(u_targ.conj().T)
        self.period = period
        self.nt_max = nt_max
        m_train = kick * np.exp(-1j * omegas * period)[None, :]
        lam, p = np.linalg.eig(m_train)
        self.lam = np.ascontiguousarray(lam)
        self.p = np.ascontiguousarray(p)
        self.p_inv = np.ascontiguousarray(np.linalg.inv(p))
        self.u_on = np.empty((self.dim, self.dim), dtype=np.complex128)
        self.u_off = np.empty((self.dim, self.dim), dtype=np.complex128)
        self.v = np.empty((self.dim, self.dim), dtype=np.complex128)
        self.scratch = np.empty((self.dim, self.dim), dtype=np.complex128)
        self.coeff = np.empty(self.dim, dtype=np.complex128)
        self.powers = np.empty(self.dim, dtype=np.complex128)
        self.gaps = np.empty(self.dim + 2, dtype=np.float64)

    cdef void _accumulate(self, double complex[:, ::1] u, int n_gaps,
                          bint reverse) noexcept nogil:
        # u <- F(g_last) K F(...) ... K F(g_first) built kick by kick.
        cdef int i, j, g, idx
        cdef double ph
        cdef double complex factor
        for i in range(self.dim):
            for j in range(self.dim):
                u[i, j] = 1 if i == j else 0
        for g in range(n_gaps - 1):
            idx = (n_gaps - 1 - g) if reverse else g
            for i in range(self.dim):
                ph = -self.omegas[i] * self.gaps[idx]
                factor = cos(ph) + 1j * sin(ph)
                for j in range(self.dim):
                    u[i, j] = factor * u[i, j]
            _matmul(self.kick, u, self.scratch, self.dim)
            _copy(self.scratch, u, self.dim)
        idx = 0 if reverse else n_gaps - 1
        for i in range(self.dim):
            ph = -self.omegas[i] * self.gaps[idx]
            factor = cos(ph) + 1j * sin(ph)
            for j in range(self.dim):
                u[i, j] = factor * u[i, j]

    cdef int _load_gaps(self, double[::1] ts, int r) noexcept nogil:
        cdef int i
        cdef int n = ts.shape[0]
        cdef double prev = 0.0
        for i in range(n):
            self.gaps[i] = ts[i] - prev
            prev = ts[i]
        self.gaps[n] = r * self.period - prev
        return n + 1

    cdef void _series_coefficients(self, int n_gaps) noexcept nogil:
        # coeff_k with Tr_2(U_targ^dag U(nt)) = sum_k coeff_k lam_k^(nt - 1).
        cdef int i, j, k
        cdef double complex w0, w1, x0, x1, y
        self._accumulate(self.u_on, n_gaps, False)
        self._accumulate(self.u_off, n_gaps, True)
        _matmul(self.kick, self.u_on, self.v, self.dim)
        for k in range(self.dim):
            # x = p_inv[k, :] @ v[:, 0:2]; y = (u_targ_dag @ u_off[0:2, :]) @ p[:, k]
            x0 = 0
            x1 = 0
            for i in range(self.dim):
                x0 = x0 + self.p_inv[k, i] * self.v[i, 0]
                x1 = x1 + self.p_inv[k, i] * self.v[i, 1]
            w0 = 0
            w1 = 0
            for j in range(self.dim):
                y = (self.u_targ_dag[0, 0] * self.u_off[0, j]
                     + self.u_targ_dag[0, 1] * self.u_off[1, j])
                w0 = w0 + y * self.p[j, k]
                y = (self.u_targ_dag[1, 0] * self.u_off[0, j]
                     + self.u_targ_dag[1, 1] * self.u_off[1, j])
                w1 = w1 + y * self.p[j, k]
            self.coeff[k] = x0 * w0 + x1 * w1

    def best_train(self, times, int r):
        """Minimum infidelity over n_train in [1, nt_max], ties to the shorter train."""
        cdef double[::1] ts = np.ascontiguousarray(times, dtype=np.float64)
        cdef int n_gaps = self._load_gaps(ts, r)
        cdef int k, nt
        cdef int best_nt = 1
        cdef double complex overlap
        cdef double infid
        cdef double best = 2.0
        with nogil:
            self._series_coefficients(n_gaps)
            for k in range(self.dim):
                self.powers[k] = self.coeff[k]
            for nt in range(1, self.nt_max + 1):
                overlap = 0
                for k in range(self.dim):
                    overlap = overlap + self.powers[k]
                infid = 1.0 - 0.25 * (overlap.real * overlap.real
                                      + overlap.imag * overlap.imag)
                if infid < best:
                    best = infid
                    best_nt = nt
                for k in range(self.dim):
                    self.powers[k] = self.powers[k] * self.lam[k]
        return best, best_nt

    def infidelity_single(self, times, int r, int n_train):
        """Infidelity at one specific train length."""
        cdef double[::1] ts = np.ascontiguousarray(times, dtype=np.float64)
        cdef int n_gaps = self._load_gaps(ts, r)
        cdef int k, nt
        cdef double complex overlap
        with nogil:
            self._series_coefficients(n_gaps)
            for k in range(self.dim):
                self.powers[k] = self.coeff[k]
            for nt in range(n_train - 1):
                for k in range(self.dim):
                    self.powers[k] = self.powers[k] * self.lam[k]
            overlap = 0
            for k in range(self.dim):
                overlap = overlap + self.powers[k]
        return 1.0 - 0.25 * (overlap.real * overlap.real + overlap.imag * overlap.imag)
