import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmx.pauli import (
    DimensionError,
    HamiltonianFormatError,
    PauliSum,
    PauliWord,
    commutator,
    read_hamiltonian_file,
    sum_mul,
    sum_power,
    truncate_by_coeff,
    word_mul,
    write_hamiltonian_file,
)
from qmx.exact import sum_to_matrix, word_to_matrix

from conftest import random_hermitian_sum


def w(text, n):
    return PauliWord.parse(text, n)


def s(n, mapping):
    return PauliSum(n, {w(k, n): v for k, v in mapping.items()})


class TestWordMul:
    def test_xy_is_iz(self):
        phase, word = word_mul(w("X0", 1), w("Y0", 1))
        assert phase == 1j
        assert word == w("Z0", 1)

    def test_identity_leaves_any_word(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            word = PauliWord(3, int(rng.integers(0, 8)), int(rng.integers(0, 8)))
            phase, out = word_mul(PauliWord.identity(3), word)
            assert phase == 1.0 and out == word
            phase, out = word_mul(word, PauliWord.identity(3))
            assert phase == 1.0 and out == word

    def test_self_inverse(self):
        word = w("Z0 Z1", 2)
        phase, out = word_mul(word, word)
        assert phase == 1.0
        assert out == PauliWord.identity(2)

    def test_exhaustive_vs_dense_three_qubits(self):
        words = [
            PauliWord(3, x, z) for x in range(8) for z in range(8)
        ]
        for a in words:
            for b in words:
                phase, out = word_mul(a, b)
                lhs = word_to_matrix(a) @ word_to_matrix(b)
                rhs = phase * word_to_matrix(out)
                assert np.abs(lhs - rhs).max() < 1e-12

    def test_associativity_sampled(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            a, b, c = (
                PauliWord(3, int(rng.integers(0, 8)), int(rng.integers(0, 8)))
                for _ in range(3)
            )
            p1, ab = word_mul(a, b)
            p2, ab_c = word_mul(ab, c)
            q1, bc = word_mul(b, c)
            q2, a_bc = word_mul(a, bc)
            assert ab_c == a_bc
            assert p1 * p2 == q1 * q2

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            word_mul(w("X0", 1), w("X0", 2))


class TestWordText:
    def test_render_orders_by_qubit(self):
        word = PauliWord.from_ops(4, {3: "Y", 0: "X", 2: "Z"})
        assert word.render() == "X0 Z2 Y3"

    def test_identity_renders_as_I(self):
        assert PauliWord.identity(5).render() == "I"
        assert PauliWord.parse("I", 5) == PauliWord.identity(5)

    @given(st.integers(1, 6), st.data())
    @settings(max_examples=200, deadline=None, derandomize=True)
    def test_parse_render_round_trip(self, n, data):
        x = data.draw(st.integers(0, (1 << n) - 1))
        z = data.draw(st.integers(0, (1 << n) - 1))
        word = PauliWord(n, x, z)
        assert PauliWord.parse(word.render(), n) == word

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            PauliWord.parse("Q0", 2)
        with pytest.raises(ValueError):
            PauliWord.parse("X0 X0", 2)
        with pytest.raises(ValueError):
            PauliWord.parse("X5", 2)


class TestSumMul:
    def test_zx_squared_is_two_identity(self):
        h = s(1, {"Z0": 1.0, "X0": 1.0})
        out = sum_mul(h, h, merge_tol=0.0)
        assert len(out) == 1
        assert out.coefficient(PauliWord.identity(1)) == pytest.approx(2.0)

    def test_identity_sum_is_neutral(self):
        rng = np.random.default_rng(5)
        a = random_hermitian_sum(rng, 3, 6)
        one = PauliSum.identity_sum(3, 1.0)
        assert sum_mul(a, one) == a
        assert sum_mul(one, a) == a

    def test_disjoint_supports(self):
        out = sum_mul(s(2, {"Z0": 0.5}), s(2, {"Z1": 0.5}))
        assert out == s(2, {"Z0 Z1": 0.25})

    def test_random_vs_dense(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            a = random_hermitian_sum(rng, 4, 10)
            b = random_hermitian_sum(rng, 4, 9)
            dense = sum_to_matrix(a) @ sum_to_matrix(b)
            via_sum = sum_to_matrix(sum_mul(a, b, merge_tol=0.0))
            scale = max(1.0, np.abs(dense).max())
            assert np.abs(dense - via_sum).max() / scale < 1e-12

    def test_small_products_use_exact_path(self):
        # below the vectorized-path cutoff; ZX = iY
        a = s(1, {"Z0": 2.0})
        b = s(1, {"X0": 3.0})
        out = sum_mul(a, b)
        assert out.coefficient(w("Y0", 1)) == pytest.approx(6j)

    def test_dimension_error(self):
        with pytest.raises(DimensionError):
            sum_mul(s(1, {"Z0": 1.0}), s(2, {"Z0": 1.0}))


class TestSumPower:
    def test_zx_powers(self):
        h = s(1, {"Z0": 1.0, "X0": 1.0})
        p1, p2, p3 = sum_power(h, 3)
        assert p1 == h
        assert p2 == s(1, {"I": 2.0})
        assert p3 == s(1, {"Z0": 2.0, "X0": 2.0})

    def test_involution(self):
        h = s(1, {"Z0": 1.0})
        powers = sum_power(h, 4)
        identity = s(1, {"I": 1.0})
        assert [p == h for p in powers] == [True, False, True, False]
        assert powers[1] == identity and powers[3] == identity

    def test_word_census_plateau(self):
        h = s(1, {"Z0": 1.0, "X0": 1.0})
        seen = set()
        cumulative = []
        for p in sum_power(h, 3):
            seen |= set(p.terms.keys())
            cumulative.append(len(seen))
        assert cumulative == [2, 3, 3]

    def test_hermitian_closure(self):
        rng = np.random.default_rng(23)
        for _ in range(5):
            h = random_hermitian_sum(rng, 3, 8)
            for p in sum_power(h, 5):
                assert p.max_imag() == 0.0  # clamped exactly real

    def test_monotone_census_bounded(self):
        rng = np.random.default_rng(29)
        h = random_hermitian_sum(rng, 3, 10)
        seen = set()
        previous = 0
        for p in sum_power(h, 6):
            seen |= set(p.terms.keys())
            assert len(seen) >= previous
            previous = len(seen)
        assert len(seen) <= 4 ** 3

    def test_rejects_non_hermitian(self):
        bad = s(1, {"Z0": 1j})
        with pytest.raises(ValueError):
            sum_power(bad, 2)


class TestCommutator:
    def test_zx(self):
        out = commutator(s(1, {"Z0": 1.0}), s(1, {"X0": 1.0}))
        assert out == s(1, {"Y0": 2j})

    def test_commuting_words_vanish(self):
        out = commutator(s(2, {"Z0": 1.0}), s(2, {"Z1": 1.0}))
        assert len(out) == 0

    def test_zx_with_y(self):
        # [Z, Y] = -2iX and [X, Y] = 2iZ by 2x2 matrix arithmetic
        out = commutator(s(1, {"Z0": 1.0, "X0": 1.0}), s(1, {"Y0": 1.0}))
        assert out == s(1, {"X0": -2j, "Z0": 2j})
        dense = (
            sum_to_matrix(s(1, {"Z0": 1.0, "X0": 1.0}))
            @ sum_to_matrix(s(1, {"Y0": 1.0}))
            - sum_to_matrix(s(1, {"Y0": 1.0}))
            @ sum_to_matrix(s(1, {"Z0": 1.0, "X0": 1.0}))
        )
        assert np.abs(sum_to_matrix(out) - dense).max() < 1e-12

    def test_self_commutator_empty(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            a = random_hermitian_sum(rng, 3, 7)
            assert len(commutator(a, a)) == 0


class TestTruncate:
    def test_threshold_semantics(self):
        a = s(1, {"Z0": 1.0, "X0": 1e-6})
        kept, dropped = truncate_by_coeff(a, 1e-5)
        assert kept == s(1, {"Z0": 1.0})
        assert dropped == 1

    def test_zero_epsilon_identity(self):
        a = s(1, {"Z0": 1.0, "X0": 1e-6})
        kept, dropped = truncate_by_coeff(a, 0.0)
        assert kept is a and dropped == 0

    def test_full_truncation(self):
        a = s(1, {"Z0": 1e-3, "X0": 1e-4})
        kept, dropped = truncate_by_coeff(a, 0.5)
        assert len(kept) == 0 and dropped == 2


class TestHamiltonianFile:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(37)
        terms = {}
        for _ in range(12):
            word = PauliWord(3, int(rng.integers(0, 8)), int(rng.integers(0, 8)))
            terms[word] = complex(rng.normal(), rng.normal())
        original = PauliSum(3, terms)
        path = tmp_path / "ham.txt"
        write_hamiltonian_file(original, path)
        assert read_hamiltonian_file(path) == original

    def test_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "ham.txt"
        path.write_text(
            "# a Hamiltonian\n\nn_qubits: 2\n-0.4804 Z0  # inline comment\n\n0.25 X0 X1\n"
        )
        h = read_hamiltonian_file(path)
        assert h.coefficient(w("Z0", 2)) == pytest.approx(-0.4804)
        assert h.coefficient(w("X0 X1", 2)) == pytest.approx(0.25)

    def test_imaginary_coefficient_column(self, tmp_path):
        path = tmp_path / "ham.txt"
        path.write_text("n_qubits: 1\n0.5 -0.25 Y0\n")
        h = read_hamiltonian_file(path)
        assert h.coefficient(w("Y0", 1)) == pytest.approx(0.5 - 0.25j)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "ham.txt"
        path.write_text("0.5 Z0\n")
        with pytest.raises(HamiltonianFormatError):
            read_hamiltonian_file(path)

    def test_bad_line_reports_number(self, tmp_path):
        path = tmp_path / "ham.txt"
        path.write_text("n_qubits: 1\nnot-a-number Z0\n")
        with pytest.raises(HamiltonianFormatError, match=":2:"):
            read_hamiltonian_file(path)
