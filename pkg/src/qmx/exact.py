"""Dense-matrix ground truth: spectra and moments, independent of the Pauli path.

Everything here works on explicit 2^N x 2^N arrays assembled by Kronecker
products, so it shares no code with the symbolic algebra or the statevector
measurement path it is used to check.
"""

import numpy as np

from .pauli import PauliSum, PauliWord

DEFAULT_QUBIT_LIMIT = 12

_SINGLE = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def word_to_matrix(word: PauliWord) -> np.ndarray:
    """Dense matrix of a single word, little-endian (qubit 0 = LSB)."""
    mat = np.array([[1.0 + 0.0j]])
    for q in range(word.n_qubits - 1, -1, -1):
        mat = np.kron(mat, _SINGLE[word.letter(q)])
    return mat


def sum_to_matrix(a: PauliSum, limit: int = DEFAULT_QUBIT_LIMIT) -> np.ndarray:
    """Assemble the dense matrix of a PauliSum.

    Qubit 0 is the least-significant bit of the basis index, consistent with
    the statevector simulator.  Refuses registers above ``limit`` qubits.
    """
    if a.n_qubits > limit:
        raise ValueError(
            f"{a.n_qubits} qubits exceeds the dense-matrix limit of {limit}"
        )
    dim = 1 << a.n_qubits
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for word, coeff in a.items():
        mat += coeff * word_to_matrix(word)
    return mat


def exact_spectrum(a: np.ndarray, with_vectors: bool = False):
    """Full spectrum of a Hermitian matrix, ascending.

    Raises on non-Hermitian input (tolerance 1e-10 relative to the largest
    entry).  With ``with_vectors`` returns (eigenvalues, eigenvectors).
    """
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - a.conj().T).max() > 1e-10 * scale:
        raise ValueError("matrix is not Hermitian")
    if with_vectors:
        vals, vecs = np.linalg.eigh(a)
        return vals, vecs
    return np.linalg.eigvalsh(a)


def oracle_moments(state, a: np.ndarray, max_power: int) -> list[float]:
    """<psi|A^n|psi> for n = 1..max_power by repeated matrix-vector products.

    Never forms matrix powers and never touches the Pauli expansion, so it
    is an independent check on the measurement-path moments.
    """
    psi = np.asarray(state.amplitudes, dtype=np.complex128)
    if a.shape[0] != psi.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix {a.shape[0]}, state {psi.shape[0]}"
        )
    moments = []
    vec = psi
    for _ in range(max_power):
        vec = a @ vec
        value = np.vdot(psi, vec)
        moments.append(float(value.real))
    return moments
