"""VQE parameter optimization and the ADAPT operator-selection loop.

Gradients of single-Pauli-word generators use the two-point shift rule,
which is exact for exp(i theta P) (period pi, shift pi/4, prefactor 1).
Multi-word fermionic generators fall back to central finite differences.
The ADAPT loop selects the pool element with the largest commutator
gradient |<[H, G]>|, re-optimizing all parameters after each growth step.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .fermion import POOL_PAULI_WORD, PoolElement
from .pauli import PauliSum, commutator
from .simulate import (
    AnsatzProgram,
    estimate_depth,
    expect_sum,
    prepare_ansatz_state,
)

SHIFT = math.pi / 4
FD_STEP = 1e-5
GRAD_NORM_TOL = 1e-6


@dataclass
class VqeResult:
    energy: float
    thetas: np.ndarray
    n_iterations: int
    converged: bool


@dataclass
class AdaptIteration:
    """One ADAPT growth step (or the final stopping measurement, label='')."""

    iteration: int
    label: str
    pool_gradients: np.ndarray
    grad_norm: float
    energy: float
    depth: int


@dataclass
class AdaptTrace:
    iterations: list = field(default_factory=list)
    converged: bool = False

    def grad_norms(self):
        return [row.grad_norm for row in self.iterations]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iter", "label", "grad_norm", "energy", "depth"])
            for row in self.iterations:
                writer.writerow(
                    [row.iteration, row.label, repr(row.grad_norm),
                     repr(row.energy), row.depth]
                )


def _energy(h: PauliSum, program: AnsatzProgram) -> float:
    value = expect_sum(prepare_ansatz_state(program), h)
    if not math.isfinite(value):
        raise RuntimeError(
            f"non-finite energy {value} at thetas {program.thetas}"
        )
    return value


def parameter_shift_gradient(h: PauliSum, program: AnsatzProgram) -> np.ndarray:
    """Gradient of E(theta) = <psi(theta)|H|psi(theta)>.

    Exact shift rule per single-word generator; central differences
    (h = 1e-5) for multi-word fermionic generators.
    """
    thetas = program.thetas
    grad = np.zeros(len(thetas))
    for k, step in enumerate(program.steps):
        if step.element.kind == POOL_PAULI_WORD:
            delta, scale = SHIFT, 1.0
        else:
            delta, scale = FD_STEP, 1.0 / (2.0 * FD_STEP)
        plus = thetas.copy()
        plus[k] += delta
        minus = thetas.copy()
        minus[k] -= delta
        grad[k] = scale * (
            _energy(h, program.with_thetas(plus))
            - _energy(h, program.with_thetas(minus))
        )
    return grad


def vqe_minimize(
    h: PauliSum,
    program: AnsatzProgram,
    theta0=None,
    tol: float = 1e-7,
    max_iterations: int = 500,
) -> VqeResult:
    """Deterministic BFGS minimization with shift-rule gradients.

    Converged means the last energy improvement fell below ``tol`` and the
    gradient 2-norm at the returned point is below 1e-6.  Returns the
    best-seen parameters over all evaluations.
    """
    if theta0 is None:
        theta0 = program.thetas
    theta0 = np.asarray(theta0, dtype=float)
    if len(theta0) != len(program.steps):
        raise ValueError("theta0 length does not match the program")

    if len(program.steps) == 0:
        return VqeResult(
            energy=_energy(h, program),
            thetas=theta0,
            n_iterations=0,
            converged=True,
        )

    best = {"f": math.inf, "x": theta0}

    def fun(thetas):
        value = _energy(h, program.with_thetas(thetas))
        if value < best["f"]:
            best["f"] = value
            best["x"] = np.array(thetas)
        return value

    def jac(thetas):
        return parameter_shift_gradient(h, program.with_thetas(thetas))

    history = []
    result = minimize(
        fun,
        theta0,
        jac=jac,
        method="BFGS",
        callback=lambda xk: history.append(fun(xk)),
        options={"gtol": 1e-7, "maxiter": max_iterations},
    )

    thetas = best["x"]
    energy = _energy(h, program.with_thetas(thetas))
    grad_norm = float(
        np.linalg.norm(parameter_shift_gradient(h, program.with_thetas(thetas)))
    )
    improved_below_tol = len(history) < 2 or (history[-2] - history[-1]) < tol
    converged = grad_norm < GRAD_NORM_TOL and improved_below_tol
    return VqeResult(
        energy=energy,
        thetas=thetas,
        n_iterations=int(result.nit),
        converged=converged,
    )


def selection_gradients(
    h: PauliSum, commutators: list, state
) -> np.ndarray:
    """<psi|[H, G_e]|psi> for each precomputed pool commutator."""
    return np.array([expect_sum(state, c) for c in commutators])


def pool_commutators(h: PauliSum, pool: list) -> list:
    """[H, G_e] for every pool element; Hermitian, so real coefficients."""
    return [commutator(h, element.generator).clamped_real() for element in pool]


def adapt_run(
    h: PauliSum,
    pool: list,
    reference: str,
    grad_stop: float = 1e-2,
    max_iter: int = 50,
    vqe_tol: float = 1e-7,
) -> tuple[AnsatzProgram, AdaptTrace]:
    """Grow an ansatz by steepest-commutator-gradient selection.

    Each iteration measures the pool gradient vector on the current state,
    stops when its 2-norm falls below ``grad_stop``, otherwise appends the
    argmax-|g| element (ties broken by lowest pool index) with theta = 0 and
    re-optimizes all parameters.  max_iter = 1 produces the one-operator
    states used on top of the moment expansions.

    The trace carries one row per growth step plus a final row (empty
    label) recording the stopping gradient measurement.
    """
    if not pool:
        raise ValueError("pool must be non-empty")
    commutators = pool_commutators(h, pool)
    program = AnsatzProgram(reference, ())
    trace = AdaptTrace()

    iteration = 0
    while True:
        state = prepare_ansatz_state(program)
        gradients = selection_gradients(h, commutators, state)
        norm = float(np.linalg.norm(gradients))
        energy = expect_sum(state, h)
        if norm < grad_stop:
            trace.converged = True
            trace.iterations.append(
                AdaptIteration(
                    iteration, "", gradients, norm, energy,
                    estimate_depth(program),
                )
            )
            break
        if iteration >= max_iter:
            trace.converged = False
            trace.iterations.append(
                AdaptIteration(
                    iteration, "", gradients, norm, energy,
                    estimate_depth(program),
                )
            )
            break
        chosen = int(np.argmax(np.abs(gradients)))
        program = program.extended(pool[chosen], 0.0)
        result = vqe_minimize(h, program, tol=vqe_tol)
        program = program.with_thetas(result.thetas)
        trace.iterations.append(
            AdaptIteration(
                iteration,
                pool[chosen].label,
                gradients,
                norm,
                result.energy,
                estimate_depth(program),
            )
        )
        iteration += 1
    return program, trace
