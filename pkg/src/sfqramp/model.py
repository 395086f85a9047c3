"""Fluxonium circuit model: Fock-basis Hamiltonian, spectrum, and operators.

The qubit is a Josephson junction shunted by a large inductance and a
capacitance, biased at half a flux quantum. The Hamiltonian (per Planck
constant, energies in GHz) is

    H/h = 4 E_C n^2 - E_J cos(phi + phi_ext) + (1/2) E_L phi^2

built from harmonic-oscillator ladder operators, diagonalized in a truncated
Fock basis, and projected onto the lowest energy eigenstates. Frequencies are
returned in rad/ns so that omega * t is dimensionless with times in ns.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .numerics import eigh

__all__ = [
    "CircuitParams",
    "CoherenceRates",
    "QubitModel",
    "build_fock_operators",
    "diagonalize_model",
    "fock_convergence_shift",
    "matrix_element",
]


@dataclass(frozen=True)
class CircuitParams:
    """Circuit energies (GHz), external flux (radians) and truncation sizes."""

    e_j: float = 4.0
    e_c: float = 1.0
    e_l: float = 1.0
    phi_ext: float = np.pi
    n_fock: int = 30
    n_levels: int = 6

    def __post_init__(self):
        if self.e_c <= 0 or self.e_l <= 0:
            raise ValueError("charging and inductive energies must be positive")
        if self.n_fock < 2:
            raise ValueError("n_fock must be at least 2")
        if not 1 <= self.n_levels <= self.n_fock:
            raise ValueError("n_levels must satisfy 1 <= n_levels <= n_fock")


@dataclass(frozen=True)
class CoherenceRates:
    """Energy-loss and pure-dephasing rates in 1/ns."""

    gamma_1: float
    gamma_phi: float

    def __post_init__(self):
        if self.gamma_1 < 0 or self.gamma_phi < 0:
            raise ValueError("rates must be non-negative")

    @classmethod
    def from_times_us(cls, t1_us: float, t2_us: float) -> "CoherenceRates":
        """Rates from T1/T2 in microseconds, with Gamma_phi = 1/T2 - 1/(2 T1)."""
        t1 = t1_us * 1e3  # ns
        t2 = t2_us * 1e3
        gamma_1 = 1.0 / t1
        gamma_phi = 1.0 / t2 - 1.0 / (2.0 * t1)
        if gamma_phi < 0:
            raise ValueError("T2 exceeds 2*T1; dephasing rate would be negative")
        return cls(gamma_1=gamma_1, gamma_phi=gamma_phi)


DEFAULT_COHERENCE = CoherenceRates.from_times_us(1200.0, 800.0)


@dataclass(frozen=True)
class QubitModel:
    """Spectrum and operators projected onto the lowest energy eigenstates.

    omegas are ground-referenced angular frequencies in rad/ns (omegas[0] is
    exactly zero); phi_op and n_op are the phase and charge operators in the
    energy eigenbasis; period is the qubit period T = 2 pi / omega_01 in ns.
    """

    omegas: np.ndarray
    phi_op: np.ndarray
    n_op: np.ndarray
    period: float
    _kick_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_levels(self) -> int:
        return self.omegas.size

    def frequency_ghz(self, i: int, j: int) -> float:
        """Transition frequency (E_j - E_i)/h in GHz."""
        return float(self.omegas[j] - self.omegas[i]) / (2.0 * np.pi)


def build_fock_operators(n_fock: int, e_c: float, e_l: float) -> tuple[np.ndarray, np.ndarray]:
    """Phase and charge operators in the harmonic Fock basis.

    phi = (1/sqrt2) (8 E_C/E_L)^(1/4) (b† + b)
    n   = (i/sqrt2) (E_L/8 E_C)^(1/4) (b† - b)
    """
    if n_fock < 2:
        raise ValueError("n_fock must be at least 2")
    ladder = np.sqrt(np.arange(1, n_fock))
    annihilate = np.diag(ladder, 1).astype(complex)
    create = annihilate.conj().T
    phi = (8.0 * e_c / e_l) ** 0.25 / np.sqrt(2.0) * (create + annihilate)
    n = 1j * (e_l / (8.0 * e_c)) ** 0.25 / np.sqrt(2.0) * (create - annihilate)
    return phi, n


def _fock_hamiltonian(params: CircuitParams) -> np.ndarray:
    phi, n = build_fock_operators(params.n_fock, params.e_c, params.e_l)
    # cos as a matrix function of the Hermitian argument phi + phi_ext: exact
    # on the truncated basis, no series truncation.
    arg = phi + params.phi_ext * np.eye(params.n_fock)
    values, vectors = eigh(arg)
    cos_term = (vectors * np.cos(values)) @ vectors.conj().T
    return 4.0 * params.e_c * (n @ n) - params.e_j * cos_term + 0.5 * params.e_l * (phi @ phi)


def _ground_referenced_spectrum(params: CircuitParams) -> np.ndarray:
    energies, _ = eigh(_fock_hamiltonian(params))
    return energies - energies[0]


def fock_convergence_shift(params: CircuitParams, extra: int = 10) -> float:
    """Shift of omega_01 (rad/ns) when the Fock truncation grows by `extra`."""
    e_base = _ground_referenced_spectrum(params)
    bigger = CircuitParams(
        e_j=params.e_j,
        e_c=params.e_c,
        e_l=params.e_l,
        phi_ext=params.phi_ext,
        n_fock=params.n_fock + extra,
        n_levels=params.n_levels,
    )
    e_big = _ground_referenced_spectrum(bigger)
    return float(abs(e_big[1] - e_base[1]) * 2.0 * np.pi)


def diagonalize_model(params: CircuitParams, check_convergence: bool = True) -> QubitModel:
    """Diagonalize the circuit Hamiltonian and project onto n_levels states.

    The ground energy is shifted to zero, so free evolution over integer
    multiples of the qubit period acts as the identity on the computational
    pair. Eigenvector phases are fixed so each consecutive phase-operator
    element <j|phi|j+1> has non-negative real part, which makes the stored
    operators reproducible (the kick normalizations only use magnitudes).
    """
    phi, n = build_fock_operators(params.n_fock, params.e_c, params.e_l)
    energies, vectors = eigh(_fock_hamiltonian(params))
    energies = energies - energies[0]

    basis = vectors[:, : params.n_levels]
    phi_p = basis.conj().T @ phi @ basis
    n_p = basis.conj().T @ n @ basis

    # Phase convention: walk the ladder rotating each eigenvector so that
    # <j|phi|j+1> comes out real and non-negative.
    z = np.ones(params.n_levels, dtype=complex)
    for j in range(params.n_levels - 1):
        element = np.conj(z[j]) * phi_p[j, j + 1]
        z[j + 1] = np.conj(element) / abs(element) if abs(element) > 1e-14 else z[j]
    phi_p = z.conj()[:, None] * phi_p * z[None, :]
    n_p = z.conj()[:, None] * n_p * z[None, :]

    omegas = 2.0 * np.pi * energies[: params.n_levels]
    omegas[0] = 0.0
    if omegas.size < 2 or omegas[1] <= 0:
        raise ValueError("model does not resolve a qubit transition")
    period = 2.0 * np.pi / omegas[1]

    if check_convergence:
        shift = fock_convergence_shift(params)
        if shift > 1e-6:
            warnings.warn(
                f"omega_01 shifts by {shift:.2e} rad/ns when n_fock grows by 10; "
                "increase n_fock",
                RuntimeWarning,
                stacklevel=2,
            )

    for name, op in (("phi_op", phi_p), ("n_op", n_p)):
        if np.abs(op - op.conj().T).max() > 1e-10:
            raise AssertionError(f"{name} lost Hermiticity during projection")

    omegas.setflags(write=False)
    phi_p.setflags(write=False)
    n_p.setflags(write=False)
    return QubitModel(omegas=omegas, phi_op=phi_p, n_op=n_p, period=period)


def matrix_element(model: QubitModel, which: str, i: int, j: int) -> complex:
    """Entry (i, j) of the phase or charge operator in the energy eigenbasis."""
    if which not in ("phase", "charge"):
        raise ValueError("which must be 'phase' or 'charge'")
    dim = model.n_levels
    if not (0 <= i < dim and 0 <= j < dim):
        raise IndexError(f"level indices ({i}, {j}) out of range for {dim} levels")
    op = model.phi_op if which == "phase" else model.n_op
    return complex(op[i, j])
