"""Open-system propagation with energy loss and pure dephasing.

Density matrices are vectorized in C (row-major) order, vec(A rho B) =
(A kron B^T) vec(rho), so the Hamiltonian part of the Liouvillian reads
-i (H kron I - I kron H^T) and each collapse operator C contributes
C kron conj(C) - (1/2)(C^dag C kron I + I kron (C^dag C)^T). Dissipation
acts on the computational pair only: the paper-level rates are qubit T1/T2
numbers and no leakage-level decay rates exist to justify more. Kicks are
instantaneous, so dissipation applies during free segments only.
"""

from __future__ import annotations

import numpy as np

from .dynamics import kick_unitary
from .model import CoherenceRates, QubitModel
from .numerics import expm_general
from .schedule import Schedule, absolute_kick_times, total_duration

__all__ = [
    "free_propagator_open",
    "liouvillian",
    "open_fidelity",
    "propagate_open",
]


def _dissipator(c: np.ndarray) -> np.ndarray:
    dim = c.shape[0]
    ident = np.eye(dim)
    cdc = c.conj().T @ c
    return (
        np.kron(c, c.conj())
        - 0.5 * (np.kron(cdc, ident) + np.kron(ident, cdc.T))
    )


def liouvillian(model: QubitModel, rates: CoherenceRates) -> np.ndarray:
    """Lindblad generator with qubit energy loss and pure dephasing."""
    dim = model.n_levels
    ident = np.eye(dim)
    h = np.diag(model.omegas).astype(complex)
    gen = -1j * (np.kron(h, ident) - np.kron(ident, h.T))
    if rates.gamma_1 > 0:
        c1 = np.zeros((dim, dim), dtype=complex)
        c1[0, 1] = np.sqrt(rates.gamma_1)
        gen += _dissipator(c1)
    if rates.gamma_phi > 0:
        c2 = np.zeros((dim, dim), dtype=complex)
        c2[1, 1] = np.sqrt(2.0 * rates.gamma_phi)
        gen += _dissipator(c2)
    return gen


def free_propagator_open(model: QubitModel, t: float, rates: CoherenceRates) -> np.ndarray:
    """exp(L t) for one free-evolution segment."""
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    return expm_general(liouvillian(model, rates) * t)


def propagate_open(model: QubitModel, s: Schedule, rates: CoherenceRates) -> np.ndarray:
    """Superoperator of the full schedule under dissipative free evolution.

    Free-segment propagators are cached per distinct duration; the train
    reuses one exp(L T) for all its identical gaps.
    """
    kicks = absolute_kick_times(s, model.period)
    duration = total_duration(s, model.period)
    gen = liouvillian(model, rates)
    kick = kick_unitary(model, s.coupling, s.theta_kick)
    kick_super = np.kron(kick, kick.conj())

    segments: dict[float, np.ndarray] = {}

    def segment(dt: float) -> np.ndarray:
        key = round(dt, 12)
        if key not in segments:
            segments[key] = expm_general(gen * dt)
        return segments[key]

    dim2 = model.n_levels**2
    total = np.eye(dim2, dtype=complex)
    now = 0.0
    for t in kicks:
        if t > now:
            total = segment(t - now) @ total
        total = kick_super @ total
        now = t
    if duration > now:
        total = segment(duration - now) @ total
    return total


def open_fidelity(s_e: np.ndarray, u_targ: np.ndarray) -> float:
    """F_open = Tr(S_Q^dag (P2 kron P2) S_E) / 4 on the computational block.

    Reduces exactly to the closed process fidelity when s_e is the unitary
    conjugation superoperator of a dissipation-free schedule.
    """
    dim2 = s_e.shape[0]
    dim = int(round(np.sqrt(dim2)))
    if dim * dim != dim2:
        raise ValueError("superoperator dimension must be a perfect square")
    embedded = np.zeros((dim, dim), dtype=complex)
    embedded[:2, :2] = u_targ
    s_q = np.kron(embedded, embedded.conj())
    p2 = np.zeros((dim, dim))
    p2[0, 0] = p2[1, 1] = 1.0
    projector = np.kron(p2, p2)
    value = 0.25 * np.trace(s_q.conj().T @ projector @ s_e)
    if abs(value.imag) > 1e-10:
        raise ValueError(f"open fidelity has a non-negligible imaginary part: {value.imag:.3e}")
    return float(value.real)
