import json
import math

import numpy as np
import pytest

from qmx.exact import exact_spectrum, oracle_moments, sum_to_matrix
from qmx.fermion import hf_bitstring
from qmx.moments import (
    CacheFormatError,
    CacheMismatchError,
    ExpectationCache,
    cache_load,
    cache_save,
    cmx_energy,
    connected_moments,
    measurement_report,
    pds_energy,
    raw_moments,
    state_fingerprint,
)
from qmx.pauli import PauliSum, PauliWord
from qmx.simulate import prepare_basis_state

from conftest import random_hermitian_sum, random_state


def w(text, n):
    return PauliWord.parse(text, n)


def zx():
    return PauliSum(1, {w("Z0", 1): 1.0, w("X0", 1): 1.0})


class TestRawMoments:
    def test_zx_on_vacuum(self):
        table = raw_moments(prepare_basis_state("0"), zx(), 3, ExpectationCache(), 0.0)
        assert table.raw == pytest.approx([1.0, 2.0, 2.0], abs=1e-14)
        assert table.new_words_per_power == [2, 1, 0]
        assert table.cumulative_words == [2, 3, 3]

    def test_warm_cache_has_no_misses(self):
        cache = ExpectationCache()
        state = prepare_basis_state("0")
        first = raw_moments(state, zx(), 3, cache, 0.0)
        hits, misses = cache.hits, cache.misses
        second = raw_moments(state, zx(), 3, cache, 0.0)
        assert cache.misses == misses
        assert cache.hits > hits
        assert second.raw == first.raw  # bit-identical

    def test_eigenstate_moments_are_geometric(self):
        h = PauliSum(1, {w("Z0", 1): 1.0})
        table = raw_moments(prepare_basis_state("0"), h, 4, ExpectationCache(), 0.0)
        assert table.raw == pytest.approx([1.0, 1.0, 1.0, 1.0], abs=0)

    def test_fingerprint_mismatch_rejected(self):
        cache = ExpectationCache()
        raw_moments(prepare_basis_state("0"), zx(), 2, cache, 0.0)
        with pytest.raises(CacheMismatchError):
            raw_moments(prepare_basis_state("1"), zx(), 2, cache, 0.0)

    def test_threshold_updates_skip_counter(self):
        h = PauliSum(1, {w("Z0", 1): 1.0, w("X0", 1): 1e-6})
        cache = ExpectationCache()
        table = raw_moments(prepare_basis_state("0"), h, 1, cache, 1e-5)
        assert cache.skipped_by_threshold == 1
        assert table.raw[0] == pytest.approx(1.0)
        assert table.measured_cumulative == [1]

    def test_matches_oracle_on_random_instances(self):
        rng = np.random.default_rng(83)
        for _ in range(5):
            n = int(rng.integers(2, 5))
            h = random_hermitian_sum(rng, n, 6)
            state = random_state(rng, n)
            table = raw_moments(state, h, 5, ExpectationCache(), 0.0)
            dense = oracle_moments(state, sum_to_matrix(h), 5)
            for ours, reference in zip(table.raw, dense):
                assert ours == pytest.approx(
                    reference, rel=1e-10, abs=1e-10
                )


class TestConnectedMoments:
    def test_eigenstate_cumulants_vanish(self):
        assert connected_moments([1.0, 1.0, 1.0]) == pytest.approx([1.0, 0.0, 0.0])

    def test_zx_hand_recursion(self):
        assert connected_moments([1.0, 2.0, 2.0]) == pytest.approx([1.0, 1.0, -2.0])

    def test_third_cumulant_identity(self):
        rng = np.random.default_rng(89)
        for _ in range(20):
            m1, m2, m3 = rng.normal(size=3)
            i3 = connected_moments([m1, m2, m3])[2]
            assert i3 == pytest.approx(m3 - 3 * m2 * m1 + 2 * m1 ** 3, abs=1e-12)


def physical_connected_vectors(count, order, seed=97):
    """Connected-moment vectors from random (H, state) pairs."""
    rng = np.random.default_rng(seed)
    vectors = []
    while len(vectors) < count:
        n = int(rng.integers(1, 4))
        h = random_hermitian_sum(rng, n, 5)
        if len(h) < 2:
            continue
        state = random_state(rng, n)
        moments = oracle_moments(state, sum_to_matrix(h), 2 * order - 1)
        vector = connected_moments(moments)
        if abs(vector[2]) < 1e-6:
            continue  # avoid degenerate denominators in closed forms
        vectors.append(vector)
    return vectors


class TestCmxEnergy:
    def test_order_two_closed_form(self):
        result = cmx_energy([1.0, 1.0, -2.0], 2)
        assert not result.degenerate
        assert result.energy == pytest.approx(1.5, abs=1e-15)

    def test_eigenstate_degeneracy_guard(self):
        result = cmx_energy([3.0, 0.0, 0.0], 2)
        assert result.degenerate
        assert result.energy == 3.0

    def test_order_three_matches_printed_closed_form(self):
        for vector in physical_connected_vectors(100, 3):
            i1, i2, i3, i4, i5 = vector
            denominator = i5 * i3 - i4 ** 2
            if abs(denominator) < 1e-9:
                continue
            closed = i1 - i2 ** 2 / i3 - (i2 * i4 - i3 ** 2) ** 2 / (i3 * denominator)
            result = cmx_energy(vector, 3)
            if result.degenerate:
                continue
            assert result.energy == pytest.approx(closed, rel=1e-12, abs=1e-12)

    def test_recursion_variants_agree_through_order_three(self):
        for vector in physical_connected_vectors(20, 3, seed=101):
            original = cmx_energy(vector, 3, recursion="cioslowski")
            printed = cmx_energy(vector, 3, recursion="printed")
            if original.degenerate or printed.degenerate:
                continue
            assert original.energy == pytest.approx(printed.energy, rel=1e-12)

    def test_recursion_variants_diverge_at_order_four(self):
        diverged = False
        for vector in physical_connected_vectors(20, 4, seed=103):
            original = cmx_energy(vector, 4, recursion="cioslowski")
            printed = cmx_energy(vector, 4, recursion="printed")
            if original.degenerate or printed.degenerate:
                continue
            if abs(original.energy - printed.energy) > 1e-9 * (1 + abs(original.energy)):
                diverged = True
        assert diverged

    def test_order_one_is_first_connected_moment(self):
        assert cmx_energy([0.7], 1).energy == 0.7

    def test_insufficient_moments_rejected(self):
        with pytest.raises(ValueError):
            cmx_energy([1.0, 1.0], 2)


class TestPdsEnergy:
    def test_order_one_is_rayleigh_quotient(self):
        result = pds_energy([0.42], 1)
        assert result.ground_estimate == pytest.approx(0.42, abs=1e-15)
        assert result.excited_estimates == []

    def test_two_level_hand_solution(self):
        result = pds_energy([1.0, 2.0, 2.0], 2)
        assert np.allclose(result.matrix_m, [[2.0, 1.0], [1.0, 1.0]])
        assert np.allclose(result.vector_b, [2.0, 2.0])
        assert np.allclose(result.coeffs_a, [0.0, -2.0])
        assert result.ground_estimate == pytest.approx(-math.sqrt(2), abs=1e-12)
        assert result.excited_estimates[0] == pytest.approx(math.sqrt(2), abs=1e-12)
        assert result.fallback_from is None

    def test_eigenstate_falls_back_to_order_one(self):
        energy = -1.3
        result = pds_energy([energy, energy ** 2, energy ** 3], 2)
        assert result.order == 1
        assert result.fallback_from == 2
        assert result.ground_estimate == pytest.approx(energy, abs=1e-12)

    def test_polynomial_residual_at_roots(self):
        rng = np.random.default_rng(107)
        for _ in range(20):
            h = random_hermitian_sum(rng, 3, 8)
            state = random_state(rng, 3)
            moments = oracle_moments(state, sum_to_matrix(h), 5)
            result = pds_energy(moments, 3)
            if result.failed:
                continue
            poly = np.concatenate(([1.0], result.coeffs_a))
            scale = max(1.0, np.abs(result.coeffs_a).max())
            for root in result.roots:
                assert abs(np.polyval(poly, root)) <= 1e-8 * scale

    def test_variational_bound_sample(self):
        rng = np.random.default_rng(109)
        for _ in range(30):
            n = int(rng.integers(2, 5))
            h = random_hermitian_sum(rng, n, 8)
            state = random_state(rng, n)
            lambda_min = exact_spectrum(sum_to_matrix(h))[0]
            moments = oracle_moments(state, sum_to_matrix(h), 5)
            for order in (1, 2, 3):
                result = pds_energy(moments, order)
                if result.failed:
                    continue
                assert result.ground_estimate >= lambda_min - 1e-9

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            pds_energy([1.0], 0)
        with pytest.raises(ValueError):
            pds_energy([1.0, 2.0], 2)


class TestMeasurementReport:
    def test_zx_counts(self):
        table = raw_moments(prepare_basis_state("0"), zx(), 3, ExpectationCache(), 0.0)
        report = measurement_report(table, zx(), 2)
        powers, naive, new, cumulative, fractions = zip(*report.rows)
        assert powers == (1, 2, 3)
        assert naive == (2, 4, 8)
        assert new == (2, 1, 0)
        assert cumulative == (2, 3, 3)
        assert fractions == (1.0, 1.0, 1.0)

    def test_full_truncation_gives_zero_fraction(self):
        table = raw_moments(prepare_basis_state("0"), zx(), 3, ExpectationCache(), 10.0)
        report = measurement_report(table, zx(), 2)
        assert all(row[4] == 0.0 for row in report.rows)
        assert report.horizon_fraction == 0.0

    def test_h2_fixture_census_plateau(self, h2_problem):
        _, hamiltonian = h2_problem
        fham, _ = h2_problem
        state = prepare_basis_state(hf_bitstring(fham))
        table = raw_moments(state, hamiltonian, 7, ExpectationCache(), 0.0)
        new = table.new_words_per_power
        plateau_start = next(k for k, count in enumerate(new) if count == 0)
        assert all(count == 0 for count in new[plateau_start:])
        assert plateau_start + 1 <= 7

    def test_csv_columns(self, tmp_path):
        table = raw_moments(prepare_basis_state("0"), zx(), 3, ExpectationCache(), 0.0)
        report = measurement_report(table, zx(), 2)
        path = tmp_path / "report.csv"
        report.to_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "power,naive,actual_new,cumulative,fraction_kept"


class TestCachePersistence:
    def test_round_trip(self, tmp_path):
        cache = ExpectationCache()
        state = prepare_basis_state("0")
        raw_moments(state, zx(), 3, cache, 0.0)
        path = tmp_path / "cache.json"
        cache_save(cache, path)
        loaded = cache_load(path)
        assert loaded == cache

    def test_loaded_cache_rejects_other_state(self, tmp_path):
        cache = ExpectationCache()
        raw_moments(prepare_basis_state("0"), zx(), 2, cache, 0.0)
        path = tmp_path / "cache.json"
        cache_save(cache, path)
        loaded = cache_load(path)
        with pytest.raises(CacheMismatchError):
            loaded.bind(prepare_basis_state("1"))

    def test_empty_cache_round_trip(self, tmp_path):
        path = tmp_path / "cache.json"
        cache_save(ExpectationCache(), path)
        loaded = cache_load(path)
        assert loaded.fingerprint is None and loaded.entries == {}

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "cache.json"
        path.write_text(json.dumps({"version": 99, "fingerprint": None,
                                    "entries": {}, "counters": {}}))
        with pytest.raises(CacheFormatError, match="version"):
            cache_load(path)

    def test_corrupt_file(self, tmp_path):
        path = tmp_path / "cache.json"
        path.write_text("{not json")
        with pytest.raises(CacheFormatError):
            cache_load(path)

    def test_conflicting_store_is_an_integrity_error(self):
        cache = ExpectationCache()
        cache.store("Z0", 1.0)
        cache.store("Z0", 1.0)  # idempotent
        with pytest.raises(CacheMismatchError):
            cache.store("Z0", -1.0)

    def test_fingerprint_quantization_stability(self):
        state_a = prepare_basis_state("00")
        amps = state_a.amplitudes.copy()
        amps[0] += 1e-14  # below the 1e-12 quantum
        from qmx.simulate import Statevector

        state_b = Statevector(2, amps / np.linalg.norm(amps))
        assert state_fingerprint(state_a) == state_fingerprint(state_b)


class TestClassicalPostProcessing:
    def test_energies_rederivable_from_cache_file_alone(self, tmp_path, h2_problem):
        # persist the cache, then rebuild the moments from the symbolic
        # powers and the cached word values only (no state anywhere)
        fham, hamiltonian = h2_problem
        state = prepare_basis_state(hf_bitstring(fham))
        cache = ExpectationCache()
        table = raw_moments(state, hamiltonian, 5, cache, 0.0)
        path = tmp_path / "cache.json"
        cache_save(cache, path)

        from qmx.pauli import sum_power

        loaded = cache_load(path)
        rederived = []
        for power in sum_power(hamiltonian, 5):
            value = math.fsum(
                coeff.real * loaded.entries[word.render()]
                for word, coeff in power.items()
            )
            rederived.append(value)
        assert rederived == table.raw  # bit-identical
        direct = pds_energy(table.raw, 3).ground_estimate
        from_file = pds_energy(rederived, 3).ground_estimate
        assert from_file == direct


class TestThresholdContinuity:
    def test_h2_fixture_pds_stable_under_tight_threshold(self, h2_problem):
        fham, hamiltonian = h2_problem
        state = prepare_basis_state(hf_bitstring(fham))
        exact_table = raw_moments(state, hamiltonian, 5, ExpectationCache(), 0.0)
        tight_table = raw_moments(state, hamiltonian, 5, ExpectationCache(), 1e-5)
        for order in (1, 2, 3):
            exact = pds_energy(exact_table.raw, order).ground_estimate
            tight = pds_energy(tight_table.raw, order).ground_estimate
            assert abs(exact - tight) <= 1e-6

    def test_fraction_monotone_in_epsilon(self, h2_problem):
        fham, hamiltonian = h2_problem
        state = prepare_basis_state(hf_bitstring(fham))
        fractions = []
        for epsilon in (0.0, 1e-3, 1e-2, 1e-1):
            table = raw_moments(state, hamiltonian, 5, ExpectationCache(), epsilon)
            report = measurement_report(table, hamiltonian, 3)
            fractions.append(report.horizon_fraction)
        for larger_eps, smaller_eps in zip(fractions[1:], fractions):
            assert larger_eps <= smaller_eps + 1e-12
