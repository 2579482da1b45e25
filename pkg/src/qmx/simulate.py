"""Noiseless statevector simulation.

Basis-state preparation, exponentials of anti-Hermitian Pauli generators and
exact (infinite-sampling) expectation values.  Basis indexing is
little-endian: qubit 0 is the least-significant bit of the amplitude index,
and bit q of a reference bitstring like ``"1100"`` refers to qubit q.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .pauli import DimensionError, PauliSum, PauliWord

NORM_TOL = 1e-10

_index_cache: dict[int, np.ndarray] = {}


def _indices(n_qubits: int) -> np.ndarray:
    arr = _index_cache.get(n_qubits)
    if arr is None:
        arr = np.arange(1 << n_qubits, dtype=np.uint64)
        _index_cache[n_qubits] = arr
    return arr


class Statevector:
    """2^n complex amplitudes with unit norm."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes):
        amps = np.asarray(amplitudes, dtype=np.complex128).copy()
        if amps.shape != (1 << n_qubits,):
            raise DimensionError(
                f"expected {1 << n_qubits} amplitudes, got {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1")
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "amplitudes", amps)
        amps.setflags(write=False)

    def __setattr__(self, name, value):
        raise AttributeError("Statevector is immutable")

    def fidelity(self, other: "Statevector") -> float:
        """|<self|other>|^2."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


def prepare_basis_state(bits: str) -> Statevector:
    """Computational basis state for a bitstring; bits[q] is qubit q."""
    if not bits or any(ch not in "01" for ch in bits):
        raise ValueError(f"bad bitstring {bits!r}")
    n = len(bits)
    index = sum(1 << q for q, ch in enumerate(bits) if ch == "1")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return Statevector(n, amps)


def _apply_word(amplitudes: np.ndarray, word: PauliWord) -> np.ndarray:
    """W|psi> for a bare word: basis permutation with +-1/+-i phases."""
    n = word.n_qubits
    idx = _indices(n)
    src = idx ^ np.uint64(word.x_mask)
    parity = np.bitwise_count(src & np.uint64(word.z_mask)).astype(np.int64) & 1
    signs = 1.0 - 2.0 * parity
    phase = 1j ** word.y_count
    return phase * signs * amplitudes[src]


def expect_word(state: Statevector, word: PauliWord) -> float:
    """<s|w|s>; guaranteed real and in [-1, 1]."""
    if word.n_qubits != state.n_qubits:
        raise DimensionError(
            f"word on {word.n_qubits} qubits, state on {state.n_qubits}"
        )
    value = np.vdot(state.amplitudes, _apply_word(state.amplitudes, word))
    if abs(value.imag) > 1e-10:
        raise RuntimeError(
            f"expectation of a Pauli word came out complex ({value}); "
            "this indicates an internal phase bug"
        )
    return float(min(1.0, max(-1.0, value.real)))


def expect_sum(state: Statevector, a: PauliSum) -> float:
    """<s|A|s> for Hermitian A, as the coefficient-weighted sum of word values."""
    if a.n_qubits != state.n_qubits:
        raise DimensionError(
            f"operator on {a.n_qubits} qubits, state on {state.n_qubits}"
        )
    if not a.is_hermitian():
        raise ValueError("expect_sum requires a Hermitian operator")
    return math.fsum(
        coeff.real * expect_word(state, word) for word, coeff in a.items()
    )


@dataclass(frozen=True)
class AnsatzStep:
    """One generator application exp(theta * G)."""

    element: object  # PoolElement
    theta: float


@dataclass(frozen=True)
class AnsatzProgram:
    """Ordered generator applications on top of a reference basis state.

    Step 0 acts first (nearest the reference).
    """

    reference: str
    steps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        n = len(self.reference)
        object.__setattr__(self, "steps", tuple(self.steps))
        for step in self.steps:
            if step.element.generator.n_qubits != n:
                raise DimensionError(
                    "pool element register does not match the reference"
                )

    @property
    def n_qubits(self) -> int:
        return len(self.reference)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([s.theta for s in self.steps], dtype=float)

    def with_thetas(self, thetas) -> "AnsatzProgram":
        if len(thetas) != len(self.steps):
            raise ValueError("theta vector length does not match program")
        return AnsatzProgram(
            self.reference,
            tuple(
                AnsatzStep(s.element, float(t))
                for s, t in zip(self.steps, thetas)
            ),
        )

    def extended(self, element, theta=0.0) -> "AnsatzProgram":
        return AnsatzProgram(
            self.reference, self.steps + (AnsatzStep(element, float(theta)),)
        )


def apply_generator_exp(state: Statevector, element, theta: float) -> Statevector:
    """exp(theta * G)|state> for an anti-Hermitian Pauli generator G.

    Every stored term of G is i * r * word with real r, so each factor has
    the closed form cos(phi)|s> + i sin(phi) W|s> with phi = theta * r.
    Multi-word generators are applied as a single first-order Trotter pass
    in canonical word order (the disentangled-ansatz convention).
    """
    generator = element.generator
    if generator.n_qubits != state.n_qubits:
        raise DimensionError(
            f"generator on {generator.n_qubits} qubits, "
            f"state on {state.n_qubits}"
        )
    amps = state.amplitudes
    for word, coeff in generator.items():
        if abs(coeff.real) > 1e-10:
            raise ValueError(
                "generator is not anti-Hermitian: coefficient "
                f"{coeff} of {word} has a real part"
            )
        phi = theta * coeff.imag
        if phi == 0.0:
            continue
        amps = math.cos(phi) * amps + 1j * math.sin(phi) * _apply_word(
            amps, word
        )
    return Statevector(state.n_qubits, amps)


def prepare_ansatz_state(program: AnsatzProgram) -> Statevector:
    """Apply program steps in order to the reference basis state."""
    state = prepare_basis_state(program.reference)
    for step in program.steps:
        state = apply_generator_exp(state, step.element, step.theta)
    return state


def _word_depth(word: PauliWord) -> int:
    """Standard-decomposition depth of exp(i phi W).

    Weight w >= 2: one basis-change layer, (w-1) entangling gates, the
    rotation, (w-1) entangling gates back, one un-rotation layer
    (CNOT-staircase pattern).  Weight 1 is a bare single-qubit rotation.
    """
    w = word.weight
    if w == 0:
        return 0
    if w == 1:
        return 1
    return 2 * (w - 1) + 3


def estimate_depth(program: AnsatzProgram) -> int:
    """Deterministic circuit-depth estimate: HF layer + per-word exponentials.

    Fermionic elements count as the sum over their Trotterized word
    exponentials.  The convention is documented, not calibrated: a single
    YXXX exponential counts 9 (+1 for state prep), while hand-compiled
    circuits can be shallower.
    """
    depth = 1  # bit-flip preparation layer
    for step in program.steps:
        depth += sum(_word_depth(w) for w, _ in step.element.generator.items())
    return depth


def dump_amplitudes(state: Statevector, path) -> None:
    """Debug dump: one ``index real imag`` line per amplitude."""
    with open(path, "w") as fh:
        for index, amp in enumerate(state.amplitudes):
            fh.write(f"{index} {float(amp.real)!r} {float(amp.imag)!r}\n")


def load_amplitudes(path) -> Statevector:
    """Read a dump_amplitudes file back into a normalized state."""
    entries = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'index real imag'")
            entries[int(parts[0])] = complex(float(parts[1]), float(parts[2]))
    dim = len(entries)
    n = dim.bit_length() - 1
    if dim == 0 or dim != 1 << n:
        raise ValueError(f"{path}: {dim} amplitudes is not a power of two")
    amps = np.zeros(dim, dtype=np.complex128)
    for index, amp in entries.items():
        if not 0 <= index < dim:
            raise ValueError(f"{path}: index {index} out of range")
        amps[index] = amp
    return Statevector(n, amps)
