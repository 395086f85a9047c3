"""Dense linear-algebra and minimization kernels shared by the physics modules.

Everything here operates on small dense complex matrices (2x2 qubit blocks,
6x6 level spaces, 36x36 superoperators) and real parameter vectors of at most
six entries, so plain dense algorithms are the right tool: LAPACK Hermitian
eigensolves, Pade scaling-and-squaring for general exponentials, and a
BFGS quasi-Newton loop with central finite-difference gradients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "MinimizerOptions",
    "eigh",
    "expm_hermitian",
    "expm_general",
    "minimize",
]

HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class MinimizerOptions:
    """Knobs for the quasi-Newton minimizer.

    gradient_step is the absolute central-difference step, in the same units
    as the variables being optimized.
    """

    gradient_step: float = 1e-7
    gradient_tolerance: float = 1e-10
    max_iterations: int = 500

    def __post_init__(self):
        if self.gradient_step <= 0:
            raise ValueError("gradient_step must be positive")
        if self.gradient_tolerance <= 0:
            raise ValueError("gradient_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")


def _require_hermitian(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dev = np.abs(m - m.conj().T)
    if dev.max() > HERMITICITY_TOL:
        i, j = np.unravel_index(int(dev.argmax()), dev.shape)
        raise ValueError(
            f"matrix is not Hermitian: |m[{i},{j}] - conj(m[{j},{i}])| = {dev[i, j]:.3e}"
        )
    return m


def eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (values, vectors) with eigenvalues ascending and eigenvectors as
    orthonormal columns. Rejects non-Hermitian input, naming the worst entry.
    """
    m = _require_hermitian(m)
    values, vectors = np.linalg.eigh(m)
    return values, vectors


def expm_hermitian(h: np.ndarray, scale: complex = 1.0) -> np.ndarray:
    """exp(scale * h) for Hermitian h, via eigendecomposition.

    Exact for the truncated matrix (no series truncation); for purely
    imaginary scale the result is unitary to roundoff.
    """
    values, vectors = eigh(h)
    return (vectors * np.exp(scale * values)) @ vectors.conj().T


# Diagonal Pade approximant coefficients for exp, orders 3/5/7/9/13, with the
# 1-norm thresholds of the scaling-and-squaring method (Higham 2005).
_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (
        17643225600.0,
        8821612800.0,
        2075673600.0,
        302702400.0,
        30270240.0,
        2162160.0,
        110880.0,
        3960.0,
        90.0,
        1.0,
    ),
    13: (
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ),
}
_PADE_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade_low(a: np.ndarray, order: int) -> np.ndarray:
    b = _PADE_COEFFS[order]
    n = a.shape[0]
    ident = np.eye(n, dtype=a.dtype)
    a2 = a @ a
    powers = [ident, a2]
    for _ in range((order - 1) // 2 - 1):
        powers.append(powers[-1] @ a2)
    u = np.zeros_like(a)
    v = np.zeros_like(a)
    for k, p in enumerate(powers):
        u += b[2 * k + 1] * p
        v += b[2 * k] * p
    u = a @ u
    return np.linalg.solve(v - u, v + u)


def _pade_13(a: np.ndarray) -> np.ndarray:
    b = _PADE_COEFFS[13]
    n = a.shape[0]
    ident = np.eye(n, dtype=a.dtype)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    return np.linalg.solve(v - u, v + u)


def expm_general(m: np.ndarray) -> np.ndarray:
    """Matrix exponential of any square complex matrix.

    Pade approximation with scaling and squaring; used for the 36x36
    Liouvillian propagators where no Hermitian structure is available.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    norm = np.linalg.norm(a, 1)
    if norm <= _PADE_THETA[9]:
        for order in (3, 5, 7, 9):
            if norm <= _PADE_THETA[order]:
                return _pade_low(a, order)
    squarings = max(0, int(np.ceil(np.log2(norm / _PADE_THETA[13]))))
    result = _pade_13(a / 2.0**squarings)
    for _ in range(squarings):
        result = result @ result
    return result


def central_difference_gradient(
    f: Callable[[np.ndarray], float], x: np.ndarray, step: float
) -> np.ndarray:
    """Central finite-difference gradient of f at x with absolute step."""
    grad = np.empty_like(x)
    probe = x.copy()
    for i in range(x.size):
        probe[i] = x[i] + step
        f_plus = f(probe)
        probe[i] = x[i] - step
        f_minus = f(probe)
        probe[i] = x[i]
        grad[i] = (f_plus - f_minus) / (2.0 * step)
    return grad


def minimize(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float] | np.ndarray,
    opts: MinimizerOptions = MinimizerOptions(),
) -> tuple[np.ndarray, float]:
    """BFGS descent with central finite-difference gradients.

    Runs from x0 until the gradient infinity-norm drops below
    opts.gradient_tolerance, max_iterations is hit, or a backtracking line
    search can no longer improve. Non-finite objective values encountered
    during the search are treated as failed trial steps and backtracked over.
    Returns the best point ever evaluated, so f_best <= f(x0) always.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    if not np.all(np.isfinite(x)):
        raise ValueError("initial point contains non-finite entries")

    best_x = x.copy()
    best_f = np.inf

    def tracked(point: np.ndarray) -> float:
        nonlocal best_x, best_f
        value = float(f(point))
        if np.isfinite(value) and value < best_f:
            best_f = value
            best_x = point.copy()
        return value

    fx = tracked(x)
    if not np.isfinite(fx):
        raise ValueError("objective is not finite at the initial point")

    n = x.size
    ident = np.eye(n)
    h_inv = ident.copy()
    grad = central_difference_gradient(tracked, x, opts.gradient_step)
    first_update = True
    stalled = 0

    for _ in range(opts.max_iterations):
        if np.linalg.norm(grad, np.inf) < opts.gradient_tolerance:
            break
        direction = -h_inv @ grad
        slope = float(grad @ direction)
        if slope >= 0.0:
            # Stale curvature model; restart from steepest descent.
            h_inv = ident.copy()
            first_update = True
            direction = -grad
            slope = float(grad @ direction)
            if slope >= 0.0:
                break
        # Backtracking Armijo line search; non-finite trial values simply
        # shrink the step further.
        alpha = 1.0
        x_new = None
        f_new = fx
        for _ in range(40):
            candidate = x + alpha * direction
            f_cand = tracked(candidate)
            if np.isfinite(f_cand) and f_cand <= fx + 1e-4 * alpha * slope:
                x_new, f_new = candidate, f_cand
                break
            alpha *= 0.5
        if x_new is None:
            break

        # Give up once steps stop paying: finite-difference noise floor.
        if fx - f_new <= 1e-12 * abs(fx) + 1e-16:
            stalled += 1
            if stalled >= 2:
                x, fx = x_new, f_new
                break
        else:
            stalled = 0

        grad_new = central_difference_gradient(tracked, x_new, opts.gradient_step)
        s = x_new - x
        y = grad_new - grad
        sy = float(s @ y)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            if first_update:
                # Standard self-scaling of the initial inverse Hessian.
                h_inv = (sy / float(y @ y)) * ident
                first_update = False
            rho = 1.0 / sy
            left = ident - rho * np.outer(s, y)
            h_inv = left @ h_inv @ left.T + rho * np.outer(s, s)
        x, fx, grad = x_new, f_new, grad_new

    return best_x, best_f
