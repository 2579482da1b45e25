import numpy as np
import pytest
from pathlib import Path

import qmx

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def random_hermitian_sum(rng, n_qubits, n_terms, scale=1.0):
    """Random Hermitian PauliSum: real coefficients on random words."""
    terms = {}
    for _ in range(n_terms):
        x = int(rng.integers(0, 1 << n_qubits))
        z = int(rng.integers(0, 1 << n_qubits))
        word = qmx.PauliWord(n_qubits, x, z)
        terms[word] = terms.get(word, 0.0) + scale * rng.normal()
    return qmx.PauliSum(n_qubits, terms)


def random_state(rng, n_qubits):
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    amps /= np.linalg.norm(amps)
    return qmx.Statevector(n_qubits, amps)


@pytest.fixture(scope="session")
def h2_problem():
    """Equilibrium H2/STO-3G: (FermionHamiltonian, qubit Hamiltonian)."""
    fham = qmx.parse_fcidump(fixture_path("h2_sto3g_0.7414.fcidump"))
    return fham, qmx.jordan_wigner(fham)


@pytest.fixture(scope="session")
def h2_stretched_problem():
    """Stretched H2/STO-3G at 2.0 A."""
    fham = qmx.parse_fcidump(fixture_path("h2_sto3g_2.0.fcidump"))
    return fham, qmx.jordan_wigner(fham)


@pytest.fixture(scope="session")
def h2_631g_problem():
    """Stretched H2/6-31G at 2.0 A (8 qubits)."""
    fham = qmx.parse_fcidump(fixture_path("h2_631g_2.0.fcidump"))
    return fham, qmx.jordan_wigner(fham)


@pytest.fixture(scope="session")
def h4_problem():
    """Linear H4/STO-3G chain, adjacent spacing 2.0 A (8 qubits)."""
    fham = qmx.parse_fcidump(fixture_path("h4_sto3g_linear_2.0.fcidump"))
    return fham, qmx.jordan_wigner(fham)
