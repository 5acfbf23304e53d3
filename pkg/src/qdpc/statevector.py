"""Exact statevector simulation of Grover amplification on q qubits.

States are dense complex amplitude vectors over the 2**q basis states; the
phase oracle and the diffusion reflection are applied directly to the
amplitudes, so one amplification round is exact up to float rounding.
Capped at 12 qubits to keep everything desk-scale.
"""

from __future__ import annotations

import math

import numpy as np

QUBIT_CAP = 12


def n_states(q: int) -> int:
    if not 1 <= q <= QUBIT_CAP:
        raise ValueError(f"need 1 <= q <= {QUBIT_CAP}, got {q}")
    return 2**q


def uniform_state(q: int) -> np.ndarray:
    """Equal superposition over all 2**q basis states."""
    dim = n_states(q)
    return np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)


def _check_state(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    dim = state.shape[0]
    if state.ndim != 1 or dim < 2 or (dim & (dim - 1)) != 0:
        raise ValueError("state must be a length-2**q amplitude vector")
    if dim > 2**QUBIT_CAP:
        raise ValueError(f"state exceeds the {QUBIT_CAP}-qubit cap")
    return state


def apply_phase_oracle(state: np.ndarray, marks: np.ndarray) -> np.ndarray:
    """Flip the sign of every marked basis amplitude."""
    state = _check_state(state)
    marks = np.asarray(marks, dtype=bool)
    if marks.shape != state.shape:
        raise ValueError(
            f"marks shape {marks.shape} does not match state shape {state.shape}"
        )
    out = state.copy()
    out[marks] = -out[marks]
    return out


def apply_diffusion(state: np.ndarray) -> np.ndarray:
    """Reflect about the uniform superposition: a_k -> 2 * mean(a) - a_k."""
    state = _check_state(state)
    return 2.0 * state.mean() - state


def measurement_probabilities(state: np.ndarray) -> np.ndarray:
    state = _check_state(state)
    p = np.abs(state) ** 2
    total = p.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"state is not normalized: |amplitudes|^2 sums to {total}")
    return p / total

def measure(state: np.ndarray, rng: np.random.Generator) -> int:
    """Sample one basis state from the Born distribution."""
    p = measurement_probabilities(state)
    return int(rng.choice(p.shape[0], p=p))


def grover_round(state: np.ndarray, marks: np.ndarray) -> np.ndarray:
    """One amplification round: phase oracle then diffusion."""
    return apply_diffusion(apply_phase_oracle(state, marks))


def marked_probability_after_round(q: int, marks: np.ndarray) -> float:
    """Exact chance of measuring a marked state after one round on the
    uniform start; analytically sin(3 * asin(sqrt(t / 2**q)))**2."""
    state = grover_round(uniform_state(q), marks)
    p = measurement_probabilities(state)
    return float(p[np.asarray(marks, dtype=bool)].sum())
