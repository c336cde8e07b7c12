"""Named operator and state library addressable from scenario files."""

from __future__ import annotations

import numpy as np

from .quantum import MeasurementFamily, Povm, PureState, hermitian_sqrt


def pauli_x() -> np.ndarray:
    return np.array([[0, 1], [1, 0]], dtype=complex)


def pauli_y() -> np.ndarray:
    return np.array([[0, -1j], [1j, 0]], dtype=complex)


def pauli_z() -> np.ndarray:
    return np.array([[1, 0], [0, -1]], dtype=complex)


def hadamard() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def identity(d: int = 2) -> np.ndarray:
    return np.eye(d, dtype=complex)


def clock(d: int) -> np.ndarray:
    """diag(1, w, w^2, ...) with w = exp(2 pi i / d)."""
    w = np.exp(2j * np.pi / d)
    return np.diag(w ** np.arange(d))


def shift(d: int) -> np.ndarray:
    """|j> -> |j+1 mod d>.  clock @ shift = w * shift @ clock."""
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[(j + 1) % d, j] = 1
    return m


def cnot() -> np.ndarray:
    """Controlled flip, control on the first qubit of a 2x2 layout."""
    m = np.eye(4, dtype=complex)
    m[2, 2] = m[3, 3] = 0
    m[2, 3] = m[3, 2] = 1
    return m


def controlled_phase(theta: float) -> np.ndarray:
    m = np.eye(4, dtype=complex)
    m[3, 3] = np.exp(1j * theta)
    return m


_AXES = {"x": pauli_x, "y": pauli_y, "z": pauli_z}


def projector(basis: str, k: int) -> np.ndarray:
    """Rank-1 projector onto the k-th eigenvector of a Pauli axis."""
    vals, vecs = np.linalg.eigh(_AXES[basis]())
    order = np.argsort(-vals)  # eigenvalue +1 first
    v = vecs[:, order[k]]
    return np.outer(v, v.conj())


def projective_family(basis: str = "z") -> MeasurementFamily:
    return MeasurementFamily(
        (projector(basis, 0), projector(basis, 1)), (f"{basis}+", f"{basis}-")
    )


def weak_family(epsilon: float, axis: str = "z") -> MeasurementFamily:
    """M_+- = sqrt((1 +- epsilon * sigma_axis) / 2), a two-outcome weak probe."""
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    sigma = _AXES[axis]()
    eye = np.eye(2)
    return MeasurementFamily(
        (
            hermitian_sqrt((eye + epsilon * sigma) / 2),
            hermitian_sqrt((eye - epsilon * sigma) / 2),
        ),
        ("+", "-"),
    )


def unitary_family(u: np.ndarray) -> MeasurementFamily:
    """A one-outcome family: a deterministic operation, no collapse."""
    return MeasurementFamily((np.asarray(u, dtype=complex),), ("go",))


def povm_from_effects(effects) -> Povm:
    return Povm(tuple(np.asarray(e, dtype=complex) for e in effects))


# ----------------------------------------------------------------------
# Named states


def basis_state(k: int, dim: int) -> PureState:
    v = np.zeros(dim, dtype=complex)
    v[k] = 1
    return PureState(v)


def uniform_superposition(dim: int) -> PureState:
    return PureState(np.ones(dim, dtype=complex) / np.sqrt(dim))


def bell_phi_plus() -> PureState:
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / np.sqrt(2)
    return PureState(v)
