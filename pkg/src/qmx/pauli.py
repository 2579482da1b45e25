"""Exact algebra over N-qubit Pauli operators.

Words are stored in symplectic form: a pair of bit masks (x_mask, z_mask)
where bit q of each mask selects the factor on qubit q via
(x, z) = (0,0) -> I, (1,0) -> X, (1,1) -> Y, (0,1) -> Z.  A word never
carries a phase; phases accumulate in the coefficients of a PauliSum.
Products, sums, powers, commutators and coefficient truncation are exact
up to an explicit merge tolerance.
"""

import math
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

# Merging tolerance for floating-point dust created by term cancellation.
# Distinct from any physical coefficient threshold applied to moments.
DEFAULT_MERGE_TOL = 1e-12

# Imaginary residue allowed on powers of a Hermitian sum before clamping;
# anything larger indicates an algebra bug and raises.
HERMITIAN_RESIDUE_TOL = 1e-10

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)
_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_MASKS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

# The vectorized product path packs (x_mask << n) | z_mask into uint64.
_FAST_PATH_MAX_QUBITS = 32


class DimensionError(ValueError):
    """Operands act on registers of different sizes."""


class HamiltonianFormatError(ValueError):
    """Malformed qubit-Hamiltonian text file."""


@dataclass(frozen=True)
class PauliWord:
    """A tensor product of single-qubit I/X/Y/Z factors on ``n_qubits`` qubits.

    Hermitian and self-inverse as an operator.  Canonical text form lists
    non-identity factors by ascending qubit index, e.g. ``"X0 Z2 Y3"``;
    the identity word renders as ``"I"``.
    """

    n_qubits: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        top = 1 << self.n_qubits
        if not (0 <= self.x_mask < top and 0 <= self.z_mask < top):
            raise ValueError(
                f"mask has bits set at positions >= n_qubits={self.n_qubits}"
            )

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliWord":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_ops(cls, n_qubits: int, ops: dict) -> "PauliWord":
        """Build a word from ``{qubit: letter}`` with letters in I/X/Y/Z."""
        x = z = 0
        for q, letter in ops.items():
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} outside register of {n_qubits}")
            try:
                xb, zb = _MASKS[letter]
            except KeyError:
                raise ValueError(f"unknown Pauli letter {letter!r}") from None
            x |= xb << q
            z |= zb << q
        return cls(n_qubits, x, z)

    @classmethod
    def parse(cls, text: str, n_qubits: int) -> "PauliWord":
        """Parse the canonical text form, e.g. ``"X0 Z2"`` or ``"I"``."""
        text = text.strip()
        if text == "I":
            return cls.identity(n_qubits)
        ops = {}
        for token in text.split():
            letter, index = token[0], token[1:]
            if letter not in ("X", "Y", "Z") or not index.isdigit():
                raise ValueError(f"bad Pauli factor {token!r}")
            q = int(index)
            if q in ops:
                raise ValueError(f"qubit {q} listed twice in {text!r}")
            ops[q] = letter
        return cls.from_ops(n_qubits, ops)

    def letter(self, q: int) -> str:
        return _LETTERS[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)]

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return (self.x_mask | self.z_mask).bit_count()

    @property
    def y_count(self) -> int:
        return (self.x_mask & self.z_mask).bit_count()

    def render(self) -> str:
        support = self.x_mask | self.z_mask
        if support == 0:
            return "I"
        return " ".join(
            f"{self.letter(q)}{q}"
            for q in range(self.n_qubits)
            if (support >> q) & 1
        )

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"PauliWord({self.render()!r}, n_qubits={self.n_qubits})"


def word_mul(a: PauliWord, b: PauliWord) -> tuple[complex, PauliWord]:
    """Multiply two words: returns (phase, word) with phase in {1, i, -1, -i}.

    Uses the normal form P(x, z) = i^(x.z) X^x Z^z per qubit, so the phase
    exponent is popcount-additive over the register.
    """
    if a.n_qubits != b.n_qubits:
        raise DimensionError(
            f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}"
        )
    xc = a.x_mask ^ b.x_mask
    zc = a.z_mask ^ b.z_mask
    exponent = (
        (a.x_mask & a.z_mask).bit_count()
        + (b.x_mask & b.z_mask).bit_count()
        - (xc & zc).bit_count()
        + 2 * (a.z_mask & b.x_mask).bit_count()
    )
    return _PHASES[exponent % 4], PauliWord(a.n_qubits, xc, zc)


class PauliSum:
    """A complex-weighted linear combination of PauliWords on one register.

    Terms are merged on construction and coefficients with magnitude at or
    below ``merge_tol`` are dropped, so a stored sum never carries dust.
    Instances are immutable; all arithmetic returns new sums.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits, terms=None, merge_tol=DEFAULT_MERGE_TOL):
        merged = {}
        if terms:
            for word, coeff in terms.items():
                if word.n_qubits != n_qubits:
                    raise DimensionError(
                        f"word on {word.n_qubits} qubits in a "
                        f"{n_qubits}-qubit sum"
                    )
                merged[word] = merged.get(word, 0.0) + complex(coeff)
            merged = {
                w: c for w, c in merged.items() if abs(c) > merge_tol
            }
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "_terms", merged)

    def __setattr__(self, name, value):
        raise AttributeError("PauliSum is immutable")

    @classmethod
    def identity_sum(cls, n_qubits, coeff=1.0) -> "PauliSum":
        return cls(n_qubits, {PauliWord.identity(n_qubits): coeff})

    @classmethod
    def _from_merged(cls, n_qubits, merged) -> "PauliSum":
        """Internal: wrap an already-merged, dust-free dict without copying."""
        obj = cls.__new__(cls)
        object.__setattr__(obj, "n_qubits", n_qubits)
        object.__setattr__(obj, "_terms", merged)
        return obj

    @property
    def terms(self):
        """Read-only view of the word -> coefficient map."""
        return MappingProxyType(self._terms)

    def items(self):
        """Term pairs in canonical order (ascending x_mask, then z_mask)."""
        return sorted(
            self._terms.items(), key=lambda kv: (kv[0].x_mask, kv[0].z_mask)
        )

    def coefficient(self, word: PauliWord) -> complex:
        return self._terms.get(word, 0.0 + 0.0j)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __add__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        self._check_dims(other)
        merged = dict(self._terms)
        for w, c in other._terms.items():
            merged[w] = merged.get(w, 0.0) + c
        return PauliSum(self.n_qubits, merged)

    def __sub__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, scalar):
        if isinstance(scalar, PauliSum):
            return sum_mul(self, scalar)
        c = complex(scalar)
        return PauliSum._from_merged(
            self.n_qubits,
            {w: v * c for w, v in self._terms.items()} if c != 0 else {},
        )

    def __rmul__(self, scalar):
        return self.__mul__(scalar)

    def adjoint(self) -> "PauliSum":
        """Hermitian conjugate: words are Hermitian, so conjugate coefficients."""
        return PauliSum._from_merged(
            self.n_qubits,
            {w: v.conjugate() for w, v in self._terms.items()},
        )

    def max_imag(self) -> float:
        return max((abs(c.imag) for c in self._terms.values()), default=0.0)

    def is_hermitian(self, tol=HERMITIAN_RESIDUE_TOL) -> bool:
        return self.max_imag() <= tol

    def clamped_real(self, tol=HERMITIAN_RESIDUE_TOL) -> "PauliSum":
        """Drop imaginary residue up to ``tol``; larger residue raises."""
        residue = self.max_imag()
        if residue > tol:
            raise ValueError(
                f"imaginary residue {residue:.3e} exceeds {tol:.1e}; "
                "operator is not Hermitian"
            )
        return PauliSum._from_merged(
            self.n_qubits,
            {w: complex(c.real, 0.0) for w, c in self._terms.items()},
        )

    def _check_dims(self, other):
        if self.n_qubits != other.n_qubits:
            raise DimensionError(
                f"qubit counts differ: {self.n_qubits} vs {other.n_qubits}"
            )

    def __repr__(self):
        inner = " + ".join(
            f"({c:.6g})*{w.render()}" for w, c in self.items()[:4]
        )
        if len(self) > 4:
            inner += f" + ... [{len(self)} terms]"
        return f"PauliSum({self.n_qubits}q: {inner or '0'})"


def _sum_arrays(a: PauliSum):
    """Canonical-order mask/coefficient arrays of a sum (fast-path helper)."""
    pairs = a.items()
    x = np.array([w.x_mask for w, _ in pairs], dtype=np.uint64)
    z = np.array([w.z_mask for w, _ in pairs], dtype=np.uint64)
    c = np.array([c for _, c in pairs], dtype=np.complex128)
    return x, z, c


def _sum_mul_fast(a: PauliSum, b: PauliSum, merge_tol: float) -> PauliSum:
    n = a.n_qubits
    xa, za, ca = _sum_arrays(a)
    xb, zb, cb = _sum_arrays(b)
    ya = np.bitwise_count(xa & za).astype(np.int64)
    yb = np.bitwise_count(xb & zb).astype(np.int64)
    shift = np.uint64(n)
    low_mask = np.uint64((1 << n) - 1)

    keys_parts = []
    coeff_parts = []
    # Chunk rows of A so the p*q scratch arrays stay modest.
    rows_per_chunk = max(1, 4_000_000 // max(1, len(cb)))
    phase_lut = np.array(_PHASES, dtype=np.complex128)
    for start in range(0, len(ca), rows_per_chunk):
        stop = start + rows_per_chunk
        xs, zs, cs, ys = xa[start:stop], za[start:stop], ca[start:stop], ya[start:stop]
        xc = xs[:, None] ^ xb[None, :]
        zc = zs[:, None] ^ zb[None, :]
        exponent = (
            ys[:, None]
            + yb[None, :]
            - np.bitwise_count(xc & zc).astype(np.int64)
            + 2 * np.bitwise_count(zs[:, None] & xb[None, :]).astype(np.int64)
        ) & 3
        coeff = cs[:, None] * cb[None, :] * phase_lut[exponent]
        keys_parts.append(((xc << shift) | zc).ravel())
        coeff_parts.append(coeff.ravel())

    keys = np.concatenate(keys_parts)
    coeffs = np.concatenate(coeff_parts)
    unique_keys, inverse = np.unique(keys, return_inverse=True)
    merged = np.zeros(len(unique_keys), dtype=np.complex128)
    np.add.at(merged, inverse, coeffs)

    keep = np.abs(merged) > merge_tol
    out = {}
    for key, coeff in zip(unique_keys[keep], merged[keep]):
        key = int(key)
        out[PauliWord(n, key >> n, key & ((1 << n) - 1))] = complex(coeff)
    return PauliSum._from_merged(n, out)


def sum_mul(a: PauliSum, b: PauliSum, merge_tol=DEFAULT_MERGE_TOL) -> PauliSum:
    """Operator product a.b with term merging.

    Distributes word products over all term pairs, merges equal words, and
    drops merged coefficients with magnitude at or below ``merge_tol``.
    Deterministic: accumulation is order-insensitive up to a final canonical
    pass, so the result does not depend on term layout.
    """
    a._check_dims(b)
    if merge_tol < 0:
        raise ValueError("merge_tol must be >= 0")
    if a.n_qubits <= _FAST_PATH_MAX_QUBITS and len(a) * len(b) >= 64:
        return _sum_mul_fast(a, b, merge_tol)
    acc = {}
    for wa, cab in a.items():
        for wb, cbb in b.items():
            phase, w = word_mul(wa, wb)
            acc[w] = acc.get(w, 0.0) + cab * cbb * phase
    acc = {w: c for w, c in acc.items() if abs(c) > merge_tol}
    return PauliSum._from_merged(a.n_qubits, acc)


def sum_power(
    h: PauliSum, n: int, merge_tol=DEFAULT_MERGE_TOL
) -> list[PauliSum]:
    """All powers H^1 ... H^n of a Hermitian sum, by left-multiplication.

    Each power is clamped back to real coefficients; imaginary residue above
    HERMITIAN_RESIDUE_TOL raises, catching algebra errors early.
    """
    if n < 1:
        raise ValueError("power must be >= 1")
    powers = [h.clamped_real()]
    for _ in range(1, n):
        powers.append(sum_mul(h, powers[-1], merge_tol).clamped_real())
    return powers


def commutator(a: PauliSum, b: PauliSum, merge_tol=DEFAULT_MERGE_TOL) -> PauliSum:
    """[a, b] = a.b - b.a with merging; exactly empty when a and b commute."""
    ab = sum_mul(a, b, merge_tol)
    ba = sum_mul(b, a, merge_tol)
    return ab - ba


def truncate_by_coeff(a: PauliSum, epsilon: float) -> tuple[PauliSum, int]:
    """Split off terms whose |coefficient| falls below ``epsilon``.

    Returns (kept, dropped_count); epsilon = 0 keeps everything.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if epsilon == 0:
        return a, 0
    kept = {w: c for w, c in a._terms.items() if abs(c) >= epsilon}
    return PauliSum._from_merged(a.n_qubits, kept), len(a) - len(kept)


def write_hamiltonian_file(h: PauliSum, path) -> None:
    """Write the one-term-per-line qubit-Hamiltonian text format.

    Layout: ``n_qubits: N`` on the first non-comment line, then
    ``<coeff_re> [<coeff_im>] <word>`` per term in canonical order.
    """
    lines = [f"n_qubits: {h.n_qubits}"]
    for word, coeff in h.items():
        if coeff.imag != 0.0:
            lines.append(f"{coeff.real!r} {coeff.imag!r} {word.render()}")
        else:
            lines.append(f"{coeff.real!r} {word.render()}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_hamiltonian_file(path) -> PauliSum:
    """Parse the qubit-Hamiltonian text format written by write_hamiltonian_file."""
    n_qubits = None
    terms = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if n_qubits is None:
                if not line.startswith("n_qubits:"):
                    raise HamiltonianFormatError(
                        f"{path}:{lineno}: expected 'n_qubits: <N>' header"
                    )
                try:
                    n_qubits = int(line.split(":", 1)[1])
                except ValueError:
                    raise HamiltonianFormatError(
                        f"{path}:{lineno}: bad qubit count"
                    ) from None
                if n_qubits < 1:
                    raise HamiltonianFormatError(
                        f"{path}:{lineno}: n_qubits must be >= 1"
                    )
                continue
            tokens = line.split()
            try:
                re_part = float(tokens[0])
            except ValueError:
                raise HamiltonianFormatError(
                    f"{path}:{lineno}: bad coefficient {tokens[0]!r}"
                ) from None
            im_part = 0.0
            word_tokens = tokens[1:]
            if word_tokens:
                try:
                    im_part = float(word_tokens[0])
                    word_tokens = word_tokens[1:]
                except ValueError:
                    pass
            if not word_tokens:
                raise HamiltonianFormatError(
                    f"{path}:{lineno}: missing Pauli word"
                )
            try:
                word = PauliWord.parse(" ".join(word_tokens), n_qubits)
            except ValueError as exc:
                raise HamiltonianFormatError(f"{path}:{lineno}: {exc}") from None
            coeff = complex(re_part, im_part)
            terms[word] = terms.get(word, 0.0) + coeff
    if n_qubits is None:
        raise HamiltonianFormatError(f"{path}: empty file, no n_qubits header")
    return PauliSum(n_qubits, terms)
