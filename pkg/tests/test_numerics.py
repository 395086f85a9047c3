import numpy as np
import pytest

from sfqramp.numerics import (
    MinimizerOptions,
    central_difference_gradient,
    eigh,
    expm_general,
    expm_hermitian,
    minimize,
)
from conftest import random_hermitian

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class TestEigh:
    def test_pauli_z_spectrum(self):
        values, vectors = eigh(PAULI_Z)
        assert np.allclose(values, [-1.0, 1.0])
        # ascending order puts the -1 eigenvector (|1>) first
        assert np.allclose(np.abs(vectors), [[0, 1], [1, 0]])

    def test_identity(self):
        values, vectors = eigh(np.eye(6, dtype=complex))
        assert np.allclose(values, 1.0)
        assert np.abs(vectors.conj().T @ vectors - np.eye(6)).max() < 1e-10

    def test_random_reconstruction(self, rng):
        m = random_hermitian(rng, 6)
        values, vectors = eigh(m)
        rebuilt = (vectors * values) @ vectors.conj().T
        assert np.abs(rebuilt - m).max() < 1e-9 * np.linalg.norm(m)
        assert np.all(np.diff(values) >= 0)
        assert np.abs(vectors.conj().T @ vectors - np.eye(6)).max() < 1e-10

    def test_rejects_non_hermitian(self):
        bad = np.array([[0, 1], [0, 0]], dtype=complex)
        with pytest.raises(ValueError, match=r"not Hermitian.*m\[0,1\]"):
            eigh(bad)


class TestExpmHermitian:
    def test_pauli_x_quarter_turn(self):
        result = expm_hermitian(PAULI_X, 1j * np.pi / 2)
        assert np.abs(result - 1j * PAULI_X).max() < 1e-12

    def test_zero_scale(self, rng):
        h = random_hermitian(rng, 6)
        assert np.abs(expm_hermitian(h, 0.0) - np.eye(6)).max() < 1e-12

    def test_diagonal(self):
        h = np.diag([1.0, 2.0]).astype(complex)
        result = expm_hermitian(h, 1j)
        assert np.allclose(np.diag(result), [np.exp(1j), np.exp(2j)])

    def test_imaginary_scale_is_unitary(self, rng):
        h = random_hermitian(rng, 6)
        u = expm_hermitian(h, 0.37j)
        assert np.abs(u @ u.conj().T - np.eye(6)).max() < 1e-10
        v = expm_hermitian(h, -0.37j)
        assert np.abs(u @ v - np.eye(6)).max() < 1e-9


def _taylor_expm(m, terms=60):
    """Independent oracle: scaled Taylor series with repeated squaring.

    Squarings are kept minimal; every squaring doubles accumulated roundoff.
    """
    norm = np.linalg.norm(m, 1)
    squarings = max(0, int(np.ceil(np.log2(max(norm, 1e-16)))) + 2)
    a = np.asarray(m, dtype=complex) / 2.0**squarings
    total = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        total = total + term
    for _ in range(squarings):
        total = total @ total
    return total


class TestExpmGeneral:
    def test_zero_matrix(self):
        assert np.array_equal(expm_general(np.zeros((4, 4))), np.eye(4))

    def test_diagonal_real(self):
        m = np.diag([-1.0, 0.5, 3.0])
        assert np.abs(np.diag(expm_general(m)) - np.exp([-1.0, 0.5, 3.0])).max() < 1e-12

    def test_nilpotent(self):
        m = np.array([[0, 1], [0, 0]], dtype=float)
        assert np.abs(expm_general(m) - np.array([[1, 1], [0, 1]])).max() < 1e-14

    def test_against_taylor_oracle(self, rng):
        for dim, scale in ((5, 1.0), (6, 8.0), (4, 40.0)):
            m = scale * (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / dim
            reference = _taylor_expm(m)
            result = expm_general(m)
            assert np.abs(result - reference).max() < 1e-10 * np.abs(reference).max()

    def test_inverse_identity(self, rng):
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        m *= 10.0 / np.linalg.norm(m)
        product = expm_general(m) @ expm_general(-m)
        assert np.abs(product - np.eye(6)).max() < 1e-8

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            expm_general(np.zeros((2, 3)))


class TestMinimize:
    def test_quadratic(self):
        x, f = minimize(lambda v: (v[0] - 3.0) ** 2, [0.0], MinimizerOptions())
        assert abs(x[0] - 3.0) < 1e-6
        assert f <= 1e-12

    def test_rosenbrock(self):
        def rosen(v):
            return (1 - v[0]) ** 2 + 100 * (v[1] - v[0] ** 2) ** 2

        x, f = minimize(rosen, [-1.2, 1.0], MinimizerOptions())
        assert np.abs(x - 1.0).max() < 1e-4

    def test_never_worse_than_start(self, rng):
        def wiggly(v):
            return float(np.sin(3 * v[0]) * np.cos(2 * v[1]) + 0.1 * v @ v)

        for _ in range(5):
            x0 = rng.uniform(-2, 2, size=2)
            _, f = minimize(wiggly, x0, MinimizerOptions(max_iterations=20))
            assert f <= wiggly(x0)

    def test_non_finite_objective_backtracks(self):
        def guarded(v):
            if abs(v[0]) > 2.0:
                return np.nan
            return (v[0] - 1.5) ** 2

        x, f = minimize(guarded, [-1.9], MinimizerOptions())
        assert abs(x[0] - 1.5) < 1e-6

    def test_rejects_non_finite_start(self):
        with pytest.raises(ValueError):
            minimize(lambda v: float(v @ v), [np.nan], MinimizerOptions())
        with pytest.raises(ValueError):
            minimize(lambda v: np.inf, [0.0], MinimizerOptions())

    def test_option_validation(self):
        with pytest.raises(ValueError):
            MinimizerOptions(gradient_step=0.0)
        with pytest.raises(ValueError):
            MinimizerOptions(gradient_tolerance=-1.0)
        with pytest.raises(ValueError):
            MinimizerOptions(max_iterations=0)


def test_central_difference_matches_analytic_gradient(rng):
    a = random_hermitian(rng, 4).real
    b = rng.normal(size=4)

    def quad(v):
        return float(0.5 * v @ a @ v + b @ v)

    x = rng.normal(size=4)
    numeric = central_difference_gradient(quad, x.copy(), 1e-7)
    analytic = a @ x + b
    assert np.abs(numeric - analytic).max() < 1e-6 * max(1.0, np.abs(analytic).max())
