"""Hamiltonian moment expansions: raw moments with measurement caching and
coefficient thresholding, connected moments, CMX(K) and PDS(K) energies.

The moments <H^n> are evaluated along the measurement path: expand H^n into
Pauli words, drop words whose coefficient magnitude falls below the chosen
threshold, and accumulate cached-or-computed word expectations.  Because the
distinct-word census of the powers plateaus, a warm cache makes arbitrary
expansion orders free of new measurements; the dense-matrix oracle in
``qmx.exact`` provides the independent check.
"""

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliSum, sum_power, truncate_by_coeff
from .simulate import Statevector, expect_word

CACHE_FORMAT_VERSION = 1
FINGERPRINT_QUANTUM = 1e-12
CMX_DEGENERACY_TOL = 1e-12
PDS_CONDITION_LIMIT = 1e12
ROOT_IMAG_TOL = 1e-8


class CacheMismatchError(RuntimeError):
    """Cache bound to a different prepared state than the one supplied."""


class CacheFormatError(ValueError):
    """Unreadable or wrong-version cache file."""


def state_fingerprint(state: Statevector) -> str:
    """Content hash of the amplitudes, quantized to 1e-12."""
    quantized = np.round(
        np.stack([state.amplitudes.real, state.amplitudes.imag])
        / FINGERPRINT_QUANTUM
    ).astype(np.int64)
    return hashlib.sha256(quantized.tobytes()).hexdigest()


@dataclass
class ExpectationCache:
    """Pauli-word expectation values for one fixed prepared state.

    Keys are canonical word text; every stored value lies in [-1, 1].
    Counters track lookup hits, computed misses, and term evaluations
    skipped by the coefficient threshold.
    """

    fingerprint: str | None = None
    entries: dict = field(default_factory=dict)
    hits: int = 0
    misses: int = 0
    skipped_by_threshold: int = 0

    def bind(self, state: Statevector) -> None:
        """Attach to a state, or reject a mismatched one."""
        fingerprint = state_fingerprint(state)
        if self.fingerprint is None:
            self.fingerprint = fingerprint
        elif self.fingerprint != fingerprint:
            raise CacheMismatchError(
                "cache was built for a different state; refusing to mix "
                "expectation values"
            )

    def expectation(self, state: Statevector, word) -> float:
        """Cached-or-computed <state|word|state>; bind() must have run."""
        key = word.render()
        value = self.entries.get(key)
        if value is not None:
            self.hits += 1
            return value
        value = expect_word(state, word)
        self.entries[key] = value
        self.misses += 1
        return value

    def store(self, key: str, value: float) -> None:
        """Idempotent insert; conflicting values indicate cache poisoning."""
        existing = self.entries.get(key)
        if existing is not None and abs(existing - value) > 1e-12:
            raise CacheMismatchError(
                f"conflicting cached value for {key!r}: "
                f"{existing} vs {value}"
            )
        self.entries[key] = value

    def reset_counters(self) -> None:
        self.hits = self.misses = self.skipped_by_threshold = 0


@dataclass
class MomentTable:
    """Raw and connected moments of one (state, Hamiltonian) pair.

    raw[k-1] holds <H^k>; connected[k-1] holds I_k.  The census lists are
    over the untruncated powers; measured_cumulative counts the distinct
    words actually evaluated under the threshold ``epsilon``.
    """

    raw: list
    connected: list
    epsilon: float
    new_words_per_power: list
    cumulative_words: list
    measured_cumulative: list

    def moment(self, k: int) -> float:
        """<H^k> with <H^0> = 1."""
        if k == 0:
            return 1.0
        return self.raw[k - 1]


def raw_moments(
    state: Statevector,
    h: PauliSum,
    max_power: int,
    cache: ExpectationCache,
    epsilon: float,
) -> MomentTable:
    """Measurement-path moments <H^n> for n = 1..max_power.

    Each power of H is expanded symbolically, thresholded at ``epsilon``,
    and accumulated from cached-or-computed word expectations.  The word
    census is taken over the untruncated powers.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    cache.bind(state)
    powers = sum_power(h, max_power)

    raw = []
    seen: set = set()
    measured: set = set()
    new_words, cumulative, measured_cumulative = [], [], []
    for power in powers:
        words = set(power.terms.keys())
        new_words.append(len(words - seen))
        seen |= words
        cumulative.append(len(seen))

        kept, dropped = truncate_by_coeff(power, epsilon)
        cache.skipped_by_threshold += dropped
        value = math.fsum(
            coeff.real * cache.expectation(state, word)
            for word, coeff in kept.items()
        )
        measured |= set(kept.terms.keys())
        measured_cumulative.append(len(measured))
        raw.append(value)

    return MomentTable(
        raw=raw,
        connected=connected_moments(raw),
        epsilon=epsilon,
        new_words_per_power=new_words,
        cumulative_words=cumulative,
        measured_cumulative=measured_cumulative,
    )


def connected_moments(raw) -> list:
    """Connected moments I_k from raw moments <H^k>, k = 1..len(raw).

    I_k = <H^k> - sum_{i=0}^{k-2} C(k-1, i) I_{i+1} <H^{k-i-1}>,
    with <H^0> = 1.
    """
    moments = [1.0] + [float(v) for v in raw]
    connected = []
    for k in range(1, len(raw) + 1):
        value = moments[k]
        for i in range(k - 1):
            value -= math.comb(k - 1, i) * connected[i] * moments[k - i - 1]
        connected.append(value)
    return connected


@dataclass
class CmxResult:
    order: int
    energy: float
    s_table: dict
    degenerate: bool


def cmx_energy(connected, order: int, recursion: str = "cioslowski") -> CmxResult:
    """CMX(K) ground-state estimate from connected moments I_1..I_{2K-1}.

    Builds the S triangle with S_{k,1} = I_k and evaluates the nested
    expansion truncated at depth K-1.  ``recursion`` selects the triangle
    update: "cioslowski" (default) uses S_{k,i+1} = S_{k,i} S_{k+2,i} -
    S_{k+1,i}^2; "printed" uses S_{k,1} in place of S_{k,i}.  The two agree
    through K = 3 and diverge at K >= 4.

    A vanishing S_{3,i} denominator flags the result degenerate and returns
    I_1 (exact for an eigenstate, where all higher cumulants vanish).
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if recursion not in ("cioslowski", "printed"):
        raise ValueError(f"unknown recursion {recursion!r}")
    if len(connected) < 2 * order - 1:
        raise ValueError(
            f"CMX({order}) needs I_1..I_{2 * order - 1}, got {len(connected)}"
        )
    i1 = float(connected[0])
    if order == 1:
        return CmxResult(order, i1, {}, degenerate=False)

    s_table = {}
    for k in range(2, 2 * order):
        s_table[(k, 1)] = float(connected[k - 1])
    for level in range(1, order - 1):
        for k in range(2, 2 * order - 2 * level):
            first = s_table[(k, level)] if recursion == "cioslowski" else s_table[(k, 1)]
            s_table[(k, level + 1)] = (
                first * s_table[(k + 2, level)] - s_table[(k + 1, level)] ** 2
            )

    for level in range(1, order):
        if abs(s_table[(3, level)]) < CMX_DEGENERACY_TOL:
            return CmxResult(order, i1, s_table, degenerate=True)

    nested = 1.0
    for level in range(order - 1, 1, -1):
        nested = 1.0 + (
            s_table[(2, level)] ** 2
            / (s_table[(2, level - 1)] ** 2 * s_table[(3, level)])
        ) * nested
    energy = i1 - (s_table[(2, 1)] ** 2 / s_table[(3, 1)]) * nested
    if not math.isfinite(energy):
        return CmxResult(order, i1, s_table, degenerate=True)
    return CmxResult(order, energy, s_table, degenerate=False)


@dataclass
class PdsResult:
    order: int
    matrix_m: np.ndarray
    vector_b: np.ndarray
    coeffs_a: np.ndarray
    roots: np.ndarray
    ground_estimate: float | None
    excited_estimates: list
    fallback_from: int | None = None
    failed: bool = False


def _monic_roots(coeffs_a: np.ndarray) -> np.ndarray:
    """Roots of x^K + a_1 x^{K-1} + ... + a_K via the companion matrix,
    with one Newton polish step per root."""
    poly = np.concatenate(([1.0], coeffs_a))
    roots = np.roots(poly)
    derivative = np.polyder(poly)
    polished = []
    for root in roots:
        slope = np.polyval(derivative, root)
        if abs(slope) > 1e-14:
            root = root - np.polyval(poly, root) / slope
        polished.append(root)
    return np.array(polished)


def pds_energy(raw, order: int) -> PdsResult:
    """PDS(K) energies from raw moments <H^1>..<H^{2K-1}>.

    Solves M a = -b with M_ij = <H^{2K-(i+j)}> and b_i = <H^{2K-i}>, forms
    the monic polynomial with those coefficients, and takes its real roots:
    the minimum is the ground-state estimate, the rest are excited-state
    upper bounds (ascending).  An M with condition number above 1e12 falls
    back to order K-1, recorded in ``fallback_from``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if len(raw) < 2 * order - 1:
        raise ValueError(
            f"PDS({order}) needs <H^1>..<H^{2 * order - 1}>, got {len(raw)}"
        )
    moments = [1.0] + [float(v) for v in raw]

    requested = order
    while True:
        k = order
        matrix = np.array(
            [[moments[2 * k - (i + j)] for j in range(1, k + 1)]
             for i in range(1, k + 1)]
        )
        vector = np.array([moments[2 * k - i] for i in range(1, k + 1)])
        condition = np.linalg.cond(matrix)
        if k > 1 and (not np.isfinite(condition) or condition > PDS_CONDITION_LIMIT):
            order = k - 1
            continue
        break

    coeffs = np.linalg.solve(matrix, -vector)
    roots = _monic_roots(coeffs)
    real_roots = sorted(
        float(root.real)
        for root in roots
        if abs(root.imag) <= ROOT_IMAG_TOL * (1.0 + abs(root.real))
    )
    if not real_roots:
        return PdsResult(
            order=order,
            matrix_m=matrix,
            vector_b=vector,
            coeffs_a=coeffs,
            roots=roots,
            ground_estimate=None,
            excited_estimates=[],
            fallback_from=requested if order != requested else None,
            failed=True,
        )
    return PdsResult(
        order=order,
        matrix_m=matrix,
        vector_b=vector,
        coeffs_a=coeffs,
        roots=roots,
        ground_estimate=real_roots[0],
        excited_estimates=real_roots[1:],
        fallback_from=requested if order != requested else None,
    )


@dataclass
class MeasurementReport:
    """Per-power measurement accounting for a PDS/CMX order K.

    ``naive`` is the combinatorial pre-merge product count |terms(H)|^n;
    ``actual_new``/``cumulative`` come from the untruncated word census;
    ``fraction_kept`` is the measured share of that power's cumulative
    census under the table's threshold.  ``horizon_fraction`` normalizes
    the measured words through power 2K-1 by the census of the full table
    horizon, which is the quantity that grows monotonically with K.
    """

    order: int
    epsilon: float
    rows: list
    horizon_fraction: float

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["power", "naive", "actual_new", "cumulative", "fraction_kept"]
            )
            for row in self.rows:
                writer.writerow(
                    [row[0], row[1], row[2], row[3], repr(row[4])]
                )


def measurement_report(table: MomentTable, h: PauliSum, order: int) -> MeasurementReport:
    """Measurement schedule summary for expansion order K (powers 1..2K-1)."""
    horizon = 2 * order - 1
    if len(table.raw) < horizon:
        raise ValueError(
            f"table covers {len(table.raw)} powers, order {order} needs {horizon}"
        )
    n_terms = len(h)
    rows = []
    for n in range(1, horizon + 1):
        cumulative = table.cumulative_words[n - 1]
        fraction = (
            table.measured_cumulative[n - 1] / cumulative if cumulative else 0.0
        )
        rows.append(
            (n, n_terms ** n, table.new_words_per_power[n - 1], cumulative, fraction)
        )
    total_words = table.cumulative_words[-1]
    horizon_fraction = (
        table.measured_cumulative[horizon - 1] / total_words if total_words else 0.0
    )
    return MeasurementReport(
        order=order,
        epsilon=table.epsilon,
        rows=rows,
        horizon_fraction=horizon_fraction,
    )


def cache_save(cache: ExpectationCache, path) -> None:
    """Write the cache as versioned JSON (sorted keys, lossless floats)."""
    payload = {
        "version": CACHE_FORMAT_VERSION,
        "fingerprint": cache.fingerprint,
        "entries": cache.entries,
        "counters": {
            "hits": cache.hits,
            "misses": cache.misses,
            "skipped_by_threshold": cache.skipped_by_threshold,
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def cache_load(path) -> ExpectationCache:
    """Read a cache file written by cache_save."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CacheFormatError(f"{path}: corrupt cache file ({exc})") from None
    if not isinstance(payload, dict) or "version" not in payload:
        raise CacheFormatError(f"{path}: not a cache file")
    if payload["version"] != CACHE_FORMAT_VERSION:
        raise CacheFormatError(
            f"{path}: cache version {payload['version']} "
            f"(expected {CACHE_FORMAT_VERSION})"
        )
    try:
        counters = payload["counters"]
        cache = ExpectationCache(
            fingerprint=payload["fingerprint"],
            entries={str(k): float(v) for k, v in payload["entries"].items()},
            hits=int(counters["hits"]),
            misses=int(counters["misses"]),
            skipped_by_threshold=int(counters["skipped_by_threshold"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CacheFormatError(f"{path}: malformed cache payload ({exc})") from None
    for key, value in cache.entries.items():
        if not -1.0 - 1e-9 <= value <= 1.0 + 1e-9:
            raise CacheFormatError(
                f"{path}: cached expectation {key!r} = {value} outside [-1, 1]"
            )
    return cache
