"""Second-quantized molecular Hamiltonians and their qubit images.

Covers FCIDUMP ingestion (Molpro convention, chemists'-notation integrals),
the Jordan-Wigner mapping with interleaved spin-orbital ordering
(qubit 2p = spatial p alpha, qubit 2p+1 = spatial p beta), Hartree-Fock
reference bitstrings, and the two ADAPT operator pools.
"""

import math
import re
import warnings
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliSum, PauliWord, sum_mul

POOL_PAULI_WORD = "pauli_word"
POOL_FERMIONIC_SINGLE = "fermionic_singlet_single"
POOL_FERMIONIC_DOUBLE = "fermionic_singlet_double"

SYMMETRY_TOL = 1e-10


class FcidumpError(ValueError):
    """Malformed FCIDUMP file."""


@dataclass
class FermionHamiltonian:
    """Core energy plus one-/two-electron integrals over spatial orbitals.

    h2 is stored in chemists' notation: h2[p, q, r, s] = (pq|rs), with the
    full 8-fold real-integral symmetry.
    """

    n_spatial: int
    n_electrons: int
    ms2: int
    e_core: float
    h1: np.ndarray
    h2: np.ndarray

    def __post_init__(self):
        n = self.n_spatial
        self.h1 = np.asarray(self.h1, dtype=float)
        self.h2 = np.asarray(self.h2, dtype=float)
        if self.h1.shape != (n, n) or self.h2.shape != (n, n, n, n):
            raise ValueError("integral arrays do not match n_spatial")
        if not 0 < self.n_electrons <= 2 * n:
            raise ValueError(
                f"n_electrons={self.n_electrons} outside (0, {2 * n}]"
            )
        if np.abs(self.h1 - self.h1.T).max() > SYMMETRY_TOL:
            raise ValueError("h1 is not symmetric")
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if np.abs(self.h2 - self.h2.transpose(perm)).max() > SYMMETRY_TOL:
                raise ValueError("h2 violates 8-fold symmetry")

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_spatial


@dataclass(frozen=True)
class PoolElement:
    """An anti-Hermitian generator drawn from an ADAPT operator pool.

    Every stored term is i * real * word, so exp(theta * generator) is
    unitary.  A pauli_word element wraps exactly one word with coefficient i.
    """

    label: str
    generator: PauliSum
    kind: str

    def __post_init__(self):
        if self.kind not in (
            POOL_PAULI_WORD,
            POOL_FERMIONIC_SINGLE,
            POOL_FERMIONIC_DOUBLE,
        ):
            raise ValueError(f"unknown pool element kind {self.kind!r}")
        if (self.generator + self.generator.adjoint()):
            raise ValueError(f"generator of {self.label!r} is not anti-Hermitian")
        if self.kind == POOL_PAULI_WORD and len(self.generator) != 1:
            raise ValueError("pauli_word elements wrap exactly one word")


_HEADER_RE = re.compile(r"([A-Za-z0-9]+)\s*=\s*(-?\d+)")
_DATA_LINE_RE = re.compile(
    r"^\s*[-+0-9.eEdD]+(\s+\d+){4}\s*$"
)


def parse_fcidump(path) -> FermionHamiltonian:
    """Read a Molpro-convention FCIDUMP file.

    Indices are 1-based; ``value 0 0 0 0`` is the core energy, ``value i j
    0 0`` a one-electron element, anything else a chemists'-notation
    two-electron element.  Stored unique elements are completed to the full
    8-fold symmetry.  Duplicate entries overwrite with a warning.
    """
    with open(path) as fh:
        lines = fh.readlines()

    header_text = []
    data_start = None
    in_header = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not in_header:
            if not line.upper().startswith("&FCI"):
                raise FcidumpError(f"{path}:{lineno}: expected &FCI header")
            in_header = True
            header_text.append(line)
            if "&END" in line.upper() or line.endswith("/"):
                data_start = lineno + 1
                break
            continue
        if "&END" in line.upper() or line == "/" or line.endswith("/"):
            header_text.append(line)
            data_start = lineno + 1
            break
        if _DATA_LINE_RE.match(line):
            data_start = lineno
            break
        header_text.append(line)
    if data_start is None:
        data_start = len(lines) + 1

    header = " ".join(header_text)
    keys = {key.upper(): int(value) for key, value in _HEADER_RE.findall(header)}
    try:
        n_spatial = keys["NORB"]
        n_electrons = keys["NELEC"]
    except KeyError as exc:
        raise FcidumpError(f"{path}: header is missing {exc}") from None
    ms2 = keys.get("MS2", 0)
    if n_spatial < 1:
        raise FcidumpError(f"{path}: NORB must be >= 1")

    e_core = 0.0
    h1 = np.zeros((n_spatial, n_spatial))
    h2 = np.zeros((n_spatial, n_spatial, n_spatial, n_spatial))
    seen: set = set()

    for lineno in range(data_start, len(lines) + 1):
        raw = lines[lineno - 1]
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise FcidumpError(
                f"{path}:{lineno}: expected 'value i j k l', got {line!r}"
            )
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpError(
                f"{path}:{lineno}: non-numeric field in {line!r}"
            ) from None
        for index in (i, j, k, l):
            if not 0 <= index <= n_spatial:
                raise FcidumpError(
                    f"{path}:{lineno}: orbital index {index} out of range"
                )
        if (i, j, k, l) == (0, 0, 0, 0):
            key = ("core",)
            if key in seen:
                warnings.warn(f"{path}:{lineno}: duplicate core energy line")
            seen.add(key)
            e_core = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(
                    f"{path}:{lineno}: bad one-electron indices in {line!r}"
                )
            p, q = i - 1, j - 1
            key = ("h1", *sorted((p, q)))
            if key in seen:
                warnings.warn(f"{path}:{lineno}: duplicate h1 element {i},{j}")
            seen.add(key)
            h1[p, q] = value
            h1[q, p] = value
        else:
            if 0 in (i, j, k, l):
                raise FcidumpError(
                    f"{path}:{lineno}: bad two-electron indices in {line!r}"
                )
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            orbit = {
                (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
            }
            key = ("h2", min(orbit))
            if key in seen:
                warnings.warn(
                    f"{path}:{lineno}: duplicate h2 element {i},{j},{k},{l}"
                )
            seen.add(key)
            for a, b, c, d in orbit:
                h2[a, b, c, d] = value

    return FermionHamiltonian(n_spatial, n_electrons, ms2, e_core, h1, h2)


def _z_string_mask(mode: int) -> int:
    return (1 << mode) - 1


def jw_annihilation(mode: int, n_modes: int) -> PauliSum:
    """a_mode -> Z-string (x) (X + iY)/2 on qubit ``mode``."""
    z_str = _z_string_mask(mode)
    x_word = PauliWord(n_modes, 1 << mode, z_str)
    y_word = PauliWord(n_modes, 1 << mode, z_str | (1 << mode))
    return PauliSum(n_modes, {x_word: 0.5, y_word: 0.5j}, merge_tol=0.0)


def jw_creation(mode: int, n_modes: int) -> PauliSum:
    """a^dag_mode -> Z-string (x) (X - iY)/2 on qubit ``mode``."""
    z_str = _z_string_mask(mode)
    x_word = PauliWord(n_modes, 1 << mode, z_str)
    y_word = PauliWord(n_modes, 1 << mode, z_str | (1 << mode))
    return PauliSum(n_modes, {x_word: 0.5, y_word: -0.5j}, merge_tol=0.0)


def _ladder_product(n_modes: int, ops) -> PauliSum:
    """Product of (mode, dagger) ladder operators, leftmost applied last."""
    result = None
    for mode, dagger in ops:
        factor = (
            jw_creation(mode, n_modes) if dagger else jw_annihilation(mode, n_modes)
        )
        result = factor if result is None else sum_mul(result, factor, 0.0)
    if result is None:
        return PauliSum.identity_sum(n_modes)
    return result


def _accumulate(acc: dict, operator: PauliSum, coeff: float) -> None:
    for word, value in operator.terms.items():
        acc[word] = acc.get(word, 0.0) + coeff * value


def jordan_wigner(fham: FermionHamiltonian) -> PauliSum:
    """Map a FermionHamiltonian to a Hermitian qubit PauliSum.

    H = e_core + sum_pq h1[p,q] sum_s a^dag_ps a_qs
        + 1/2 sum_pqrs (pq|rs) sum_st a^dag_ps a^dag_rt a_st a_qs
    with interleaved spin-orbital ordering.
    """
    n = fham.n_spatial
    n_q = fham.n_qubits
    acc: dict[PauliWord, complex] = {PauliWord.identity(n_q): fham.e_core}

    cutoff = 1e-14
    for p in range(n):
        for q in range(n):
            coeff = fham.h1[p, q]
            if abs(coeff) <= cutoff:
                continue
            for spin in (0, 1):
                op = _ladder_product(
                    n_q, [(2 * p + spin, True), (2 * q + spin, False)]
                )
                _accumulate(acc, op, coeff)

    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    coeff = 0.5 * fham.h2[p, q, r, s]
                    if abs(coeff) <= cutoff:
                        continue
                    for sp in (0, 1):
                        for tau in (0, 1):
                            m1 = 2 * p + sp
                            m2 = 2 * r + tau
                            m3 = 2 * s + tau
                            m4 = 2 * q + sp
                            if m1 == m2 or m3 == m4:
                                continue  # a^dag a^dag or a a on one mode
                            op = _ladder_product(
                                n_q,
                                [(m1, True), (m2, True), (m3, False), (m4, False)],
                            )
                            _accumulate(acc, op, coeff)

    return PauliSum(n_q, acc).clamped_real()


def hf_bitstring(fham: FermionHamiltonian) -> str:
    """Aufbau occupation bitstring; bit q = 1 iff spin-orbital q is occupied."""
    n_alpha2 = fham.n_electrons + fham.ms2
    n_beta2 = fham.n_electrons - fham.ms2
    if n_alpha2 % 2 or n_beta2 % 2 or n_alpha2 < 0 or n_beta2 < 0:
        raise ValueError(
            f"inconsistent electron/spin counts: n_electrons={fham.n_electrons}, "
            f"ms2={fham.ms2}"
        )
    n_alpha, n_beta = n_alpha2 // 2, n_beta2 // 2
    if n_alpha > fham.n_spatial or n_beta > fham.n_spatial:
        raise ValueError("more electrons of one spin than spatial orbitals")
    bits = ["0"] * fham.n_qubits
    for p in range(n_alpha):
        bits[2 * p] = "1"
    for p in range(n_beta):
        bits[2 * p + 1] = "1"
    return "".join(bits)


def build_pauli_pool(n_qubits: int) -> list[PoolElement]:
    """All YX and YXXX words as anti-Hermitian generators i*word.

    Enumerates every word with exactly one Y and one X on distinct qubits,
    then every word with one Y and three X on four distinct qubits.  The X
    triple is order-insensitive, so it is canonicalized j < k < l; ordering
    of the pool is lexicographic by (i, j[, k, l]).
    """
    if n_qubits < 2:
        raise ValueError("the Pauli pool needs at least 2 qubits")
    pool = []

    def add(i, xs):
        word = PauliWord.from_ops(
            n_qubits, {i: "Y", **{j: "X" for j in xs}}
        )
        pool.append(
            PoolElement(
                label=word.render(),
                generator=PauliSum(n_qubits, {word: 1j}),
                kind=POOL_PAULI_WORD,
            )
        )

    for i in range(n_qubits):
        for j in range(n_qubits):
            if j != i:
                add(i, (j,))
    for i in range(n_qubits):
        rest = [q for q in range(n_qubits) if q != i]
        for a in range(len(rest)):
            for b in range(a + 1, len(rest)):
                for c in range(b + 1, len(rest)):
                    add(i, (rest[a], rest[b], rest[c]))
    return pool


def _excitation_e(n_qubits: int, p: int, q: int) -> PauliSum:
    """Spin-summed singlet excitation E_pq = sum_s a^dag_ps a_qs."""
    acc: dict[PauliWord, complex] = {}
    for spin in (0, 1):
        op = _ladder_product(n_qubits, [(2 * p + spin, True), (2 * q + spin, False)])
        _accumulate(acc, op, 1.0)
    return PauliSum(n_qubits, acc)


def _normalized_generator(candidate: PauliSum) -> PauliSum | None:
    """Scale to unit coefficient L2 norm; None for an (all but) empty sum."""
    norm = math.sqrt(
        math.fsum(abs(c) ** 2 for c in candidate.terms.values())
    )
    if norm < 1e-12:
        return None
    return (1.0 / norm) * candidate


def build_fermionic_singlet_pool(fham: FermionHamiltonian) -> list[PoolElement]:
    """Singlet-adapted single and double excitation generators.

    Singles are E_pq - E_qp for each occupied spatial q and virtual p.
    Doubles are built from products of the spin-summed E operators: for each
    occupied pair i <= j and virtual pair a <= b the two combinations
    E_ai E_bj +- E_bi E_aj, minus their adjoints.  Products of E operators
    commute with S^2 and the total number operator, so every generator is
    singlet-adapted by construction.  Generators are normalized to unit
    coefficient L2 norm; combinations that vanish are omitted.
    """
    if fham.ms2 != 0:
        raise ValueError("the singlet-adapted pool requires an ms2 = 0 reference")
    n_occ = fham.n_electrons // 2
    n_q = fham.n_qubits
    occupied = range(n_occ)
    virtual = range(n_occ, fham.n_spatial)

    e_cache: dict[tuple[int, int], PauliSum] = {}

    def exc(p, q):
        if (p, q) not in e_cache:
            e_cache[(p, q)] = _excitation_e(n_q, p, q)
        return e_cache[(p, q)]

    pool = []
    for q in occupied:
        for p in virtual:
            candidate = exc(p, q) - exc(q, p)
            generator = _normalized_generator(candidate)
            if generator is not None:
                pool.append(
                    PoolElement(
                        label=f"single({q}->{p})",
                        generator=generator,
                        kind=POOL_FERMIONIC_SINGLE,
                    )
                )

    for i in occupied:
        for j in occupied:
            if j < i:
                continue
            for a in virtual:
                for b in virtual:
                    if b < a:
                        continue
                    direct = sum_mul(exc(a, i), exc(b, j), 0.0)
                    swapped = sum_mul(exc(b, i), exc(a, j), 0.0)
                    for sign, tag in ((1.0, "+"), (-1.0, "-")):
                        excite = direct + sign * swapped
                        candidate = excite - excite.adjoint()
                        generator = _normalized_generator(candidate)
                        if generator is None:
                            continue
                        pool.append(
                            PoolElement(
                                label=f"double{tag}({i}{j}->{a}{b})",
                                generator=generator,
                                kind=POOL_FERMIONIC_DOUBLE,
                            )
                        )
    return pool


def build_s2_operator(n_spatial: int) -> PauliSum:
    """Jordan-Wigner image of S^2 = S_- S_+ + S_z (S_z + 1)."""
    if n_spatial < 1:
        raise ValueError("n_spatial must be >= 1")
    n_q = 2 * n_spatial
    plus_acc: dict[PauliWord, complex] = {}
    z_acc: dict[PauliWord, complex] = {}
    for p in range(n_spatial):
        _accumulate(
            plus_acc,
            _ladder_product(n_q, [(2 * p, True), (2 * p + 1, False)]),
            1.0,
        )
        for spin, sign in ((0, 0.5), (1, -0.5)):
            _accumulate(
                z_acc,
                _ladder_product(
                    n_q, [(2 * p + spin, True), (2 * p + spin, False)]
                ),
                sign,
            )
    s_plus = PauliSum(n_q, plus_acc)
    s_minus = s_plus.adjoint()
    s_z = PauliSum(n_q, z_acc)
    s2 = sum_mul(s_minus, s_plus, 0.0) + sum_mul(s_z, s_z, 0.0) + s_z
    return s2.clamped_real()
