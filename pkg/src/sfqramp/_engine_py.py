"""Pure-NumPy schedule-cost engine; reference twin of the compiled kernel.

The optimizer's objective is evaluated millions of times, so the mirrored
schedule structure is exploited twice. First, the on-ramp and off-ramp
propagators are built once per call and the train only ever multiplies
powers of the fixed one-period step M = K F_T between them,

    U(n_train) = U_off . M^(n_train - 1) . K . U_on.

Second, M is unitary, so with its eigendecomposition M = P diag(lam) P^-1
the projected trace against the target becomes a six-term geometric series

    Tr_2(U_targ^dag U(n_train)) = sum_k a_k lam_k^(n_train - 1),

making the exhaustive train-length scan a handful of scalar multiplies per
candidate length instead of a matrix product.
"""

from __future__ import annotations

import numpy as np


class PyScheduleEngine:
    """Evaluates mirrored-schedule process infidelity for one gate setup."""

    is_compiled = False

    def __init__(self, omegas, kick, u_targ, period, nt_max):
        self.omegas = np.asarray(omegas, dtype=float)
        self.kick = np.asarray(kick, dtype=complex)
        self.u_targ_dag = np.asarray(u_targ, dtype=complex).conj().T
        self.period = float(period)
        self.nt_max = int(nt_max)
        m_train = self.kick * np.exp(-1j * self.omegas * self.period)[None, :]
        lam, p = np.linalg.eig(m_train)
        self.lam = lam
        self.p = p
        self.p_inv = np.linalg.inv(p)

    def _ramp_propagators(self, times: np.ndarray, r: int):
        """On- and off-ramp propagators over [0, r*T); gaps reversed for the mirror."""
        edges = np.concatenate(([0.0], times, [r * self.period]))
        gaps = np.diff(edges)
        dim = self.omegas.size
        u_on = np.eye(dim, dtype=complex)
        for g in gaps[:-1]:
            u_on = self.kick @ (np.exp(-1j * self.omegas * g)[:, None] * u_on)
        u_on = np.exp(-1j * self.omegas * gaps[-1])[:, None] * u_on
        u_off = np.eye(dim, dtype=complex)
        for g in gaps[:0:-1]:
            u_off = self.kick @ (np.exp(-1j * self.omegas * g)[:, None] * u_off)
        u_off = np.exp(-1j * self.omegas * gaps[0])[:, None] * u_off
        return u_on, u_off

    def _series_coefficients(self, times: np.ndarray, r: int) -> np.ndarray:
        """a_k with Tr_2(U_targ^dag U(nt)) = sum_k a_k lam_k^(nt - 1)."""
        u_on, u_off = self._ramp_propagators(np.asarray(times, dtype=float), r)
        v1 = self.kick @ u_on
        w = self.u_targ_dag @ u_off[:2, :]
        x = self.p_inv @ v1[:, :2]
        y = w @ self.p
        return np.einsum("ki,ik->k", x, y)

    def best_train(self, times: np.ndarray, r: int) -> tuple[float, int]:
        """Minimum infidelity over n_train in [1, nt_max], ties to the shorter train."""
        a = self._series_coefficients(times, r)
        steps = np.ones((self.nt_max, a.size), dtype=complex)
        steps[1:] = self.lam
        overlaps = (np.multiply.accumulate(steps, axis=0) * a).sum(axis=1)
        infids = 1.0 - 0.25 * np.abs(overlaps) ** 2
        best = int(np.argmin(infids))  # first minimum: ties take the shorter train
        return float(infids[best]), best + 1

    def infidelity_single(self, times: np.ndarray, r: int, n_train: int) -> float:
        """Infidelity at one specific train length."""
        a = self._series_coefficients(times, r)
        overlap = np.sum(a * self.lam ** (n_train - 1))
        return float(1.0 - 0.25 * abs(overlap) ** 2)
