"""Shared generators for randomized tests. Everything is seeded explicitly
so failures reproduce."""

import numpy as np
import pytest

from entnorm.tensor_core import CompositeStructure, OperatorMatrix, StateVector

# collected by test_acceptance, printed by pytest_terminal_summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.ensure_newline()
        terminalreporter.section("acceptance criteria", sep="-")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_density(rng: np.random.Generator, dims: tuple[int, ...]) -> OperatorMatrix:
    """Unit-trace positive matrix from a square complex Gaussian factor."""
    d = int(np.prod(dims))
    g = complex_gaussian(rng, (d, d))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return OperatorMatrix(CompositeStructure(dims), rho)


def random_hermitian(rng: np.random.Generator, dims: tuple[int, ...]) -> OperatorMatrix:
    d = int(np.prod(dims))
    g = complex_gaussian(rng, (d, d))
    return OperatorMatrix(CompositeStructure(dims), (g + g.conj().T) / 2)


def random_state(rng: np.random.Generator, dims: tuple[int, ...]) -> StateVector:
    d = int(np.prod(dims))
    v = complex_gaussian(rng, d)
    return StateVector(CompositeStructure(dims), v / np.linalg.norm(v))


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(complex_gaussian(rng, (d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def bell_projector() -> OperatorMatrix:
    """Projector onto (|00> + |11>)/sqrt(2) over dims (2, 2)."""
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / np.sqrt(2)
    return OperatorMatrix(CompositeStructure((2, 2)), np.outer(v, v.conj()))


def schmidt_state(
    rng: np.random.Generator, coeffs: np.ndarray, d1: int, d2: int
) -> StateVector:
    """Two-part state with prescribed Schmidt coefficients in random bases."""
    k = len(coeffs)
    u = random_unitary(rng, d1)[:, :k]
    v = random_unitary(rng, d2)[:, :k]
    m = (u * coeffs) @ v.T
    return StateVector(CompositeStructure((d1, d2)), m.reshape(-1))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)
