import numpy as np
import pytest

from qmx.exact import exact_spectrum, oracle_moments, sum_to_matrix
from qmx.pauli import PauliSum, PauliWord
from qmx.simulate import prepare_basis_state

from conftest import random_hermitian_sum, random_state


def w(text, n):
    return PauliWord.parse(text, n)


class TestSumToMatrix:
    def test_z_on_one_qubit(self):
        mat = sum_to_matrix(PauliSum(1, {w("Z0", 1): 1.0}))
        assert np.allclose(mat, np.diag([1.0, -1.0]))

    def test_x0_on_two_qubits_swaps_bit_zero(self):
        mat = sum_to_matrix(PauliSum(2, {w("X0", 2): 1.0}))
        expected = np.zeros((4, 4))
        for index in range(4):
            expected[index ^ 1, index] = 1.0
        assert np.allclose(mat, expected)

    def test_matches_expectation_quadratic_form(self):
        rng = np.random.default_rng(41)
        from qmx.simulate import expect_sum

        for _ in range(10):
            a = random_hermitian_sum(rng, 3, 8)
            state = random_state(rng, 3)
            direct = np.vdot(
                state.amplitudes, sum_to_matrix(a) @ state.amplitudes
            ).real
            assert expect_sum(state, a) == pytest.approx(direct, abs=1e-10)

    def test_size_limit(self):
        big = PauliSum(13, {PauliWord.identity(13): 1.0})
        with pytest.raises(ValueError, match="limit"):
            sum_to_matrix(big)


class TestExactSpectrum:
    def test_diagonal(self):
        vals = exact_spectrum(np.diag([1.0, -1.0]))
        assert np.allclose(vals, [-1.0, 1.0])

    def test_z_plus_x(self):
        mat = sum_to_matrix(PauliSum(1, {w("Z0", 1): 1.0, w("X0", 1): 1.0}))
        assert np.allclose(exact_spectrum(mat), [-np.sqrt(2), np.sqrt(2)])

    def test_shift_identity(self):
        rng = np.random.default_rng(43)
        a = random_hermitian_sum(rng, 2, 6)
        mat = sum_to_matrix(a)
        shifted = mat + 0.75 * np.eye(4)
        assert np.allclose(exact_spectrum(shifted), exact_spectrum(mat) + 0.75)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            exact_spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_eigenpair_residuals(self):
        rng = np.random.default_rng(47)
        a = sum_to_matrix(random_hermitian_sum(rng, 3, 10))
        vals, vecs = exact_spectrum(a, with_vectors=True)
        norm = np.linalg.norm(a, ord=2)
        for k in range(len(vals)):
            residual = np.linalg.norm(a @ vecs[:, k] - vals[k] * vecs[:, k])
            assert residual <= 1e-8 * max(1.0, norm)


class TestOracleMoments:
    def test_eigenstate_geometric(self):
        mat = np.diag([2.0, -1.0])
        state = prepare_basis_state("0")
        assert oracle_moments(state, mat, 4) == pytest.approx([2.0, 4.0, 8.0, 16.0])

    def test_z_plus_x_from_zero(self):
        mat = sum_to_matrix(PauliSum(1, {w("Z0", 1): 1.0, w("X0", 1): 1.0}))
        state = prepare_basis_state("0")
        assert oracle_moments(state, mat, 3) == pytest.approx([1.0, 2.0, 2.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            oracle_moments(prepare_basis_state("00"), np.eye(2), 2)


def test_h2_fixture_ground_energy(h2_problem):
    _, hamiltonian = h2_problem
    mat = sum_to_matrix(hamiltonian)
    assert mat.shape == (16, 16)
    assert np.abs(mat - mat.conj().T).max() < 1e-10
    ground = exact_spectrum(mat)[0]
    assert ground == pytest.approx(-1.1373, abs=5e-4)
