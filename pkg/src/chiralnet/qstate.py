"""Exact pure-state and density-matrix algebra for small qubit registers.

Conventions
-----------
* Qubit ordering is big-endian: qubit 0 is the most significant bit of the
  basis index, so ``|ab>`` has amplitude index ``2*a + b`` on two qubits.
* States may be unnormalized: a heralded branch carries its probability in
  the squared norm, so no separate probability bookkeeping is needed.
* Registers are capped at ``MAX_QUBITS`` qubits (the largest object needed
  is a four-qubit protocol register plus two spectator qubits).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "EPS",
    "PSD_FLOOR",
    "MAX_QUBITS",
    "PureState",
    "DensityMatrix",
    "GateName",
    "gate_matrix",
    "BellLabel",
    "bell",
    "basis_state",
    "tensor",
    "embed_operator",
    "partial_trace",
    "measure_qubit",
    "fidelity",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "HADAMARD",
    "U_A",
    "U_B",
    "R_HALF_PI",
    "IDENTITY_2",
]

EPS = 1e-12          # tolerance for algebraic identities
PSD_FLOOR = -1e-10   # eigenvalue floor accepted for density matrices
MAX_QUBITS = 6

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

# Local pre-rotations used by the purification recipe.  U_A = (I - iX)/sqrt(2)
# sends |0> -> (|0> - i|1>)/sqrt(2); U_B = (I + iX)/sqrt(2) sends
# |0> -> (|0> + i|1>)/sqrt(2) and |1> -> (i|0> + |1>)/sqrt(2).
U_A = (IDENTITY_2 - 1j * SIGMA_X) / np.sqrt(2)
U_B = (IDENTITY_2 + 1j * SIGMA_X) / np.sqrt(2)

# pi/2 rotation: |0> -> (|0> + |1>)/sqrt(2), |1> -> (-|0> + |1>)/sqrt(2).
R_HALF_PI = np.array([[1, -1], [1, 1]], dtype=complex) / np.sqrt(2)


class GateName(Enum):
    SIGMA_X = "sigma_x"
    SIGMA_Z = "sigma_z"
    HADAMARD = "hadamard"
    UA = "ua"
    UB = "ub"
    R_HALF_PI = "r_half_pi"


_GATE_MATRICES = {
    GateName.SIGMA_X: SIGMA_X,
    GateName.SIGMA_Z: SIGMA_Z,
    GateName.HADAMARD: HADAMARD,
    GateName.UA: U_A,
    GateName.UB: U_B,
    GateName.R_HALF_PI: R_HALF_PI,
}


def gate_matrix(name: GateName) -> np.ndarray:
    """Return the 2x2 unitary matrix for a named gate."""
    return _GATE_MATRICES[name].copy()


class BellLabel(Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"


def _check_n_qubits(n_qubits: int) -> None:
    if not (1 <= n_qubits <= MAX_QUBITS):
        raise ValueError(f"register too large: {n_qubits} qubits (max {MAX_QUBITS})")


def _as_gate(g) -> np.ndarray:
    m = _GATE_MATRICES[g] if isinstance(g, GateName) else np.asarray(g, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("single-qubit gate must be a 2x2 matrix")
    return m


@dataclass(frozen=True)
class PureState:
    """A (possibly unnormalized) pure state on ``n_qubits`` qubits.

    The squared norm is the probability of the heralded branch the state
    represents; normalized states have squared norm 1.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_n_qubits(self.n_qubits)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** self.n_qubits:
            raise ValueError("amplitude vector length must be 2**n_qubits")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm2(self) -> float:
        """Squared norm (branch probability)."""
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "PureState":
        n2 = self.norm2
        if n2 <= 0.0:
            raise ValueError("cannot normalize a zero state")
        return PureState(self.n_qubits, self.amplitudes / np.sqrt(n2))

    def is_normalized(self, tol: float = EPS) -> bool:
        return abs(self.norm2 - 1.0) <= tol

    def apply_gate(self, g, target: int) -> "PureState":
        """Apply a single-qubit unitary to the target qubit."""
        op = embed_operator(_as_gate(g), (target,), self.n_qubits)
        return PureState(self.n_qubits, op @ self.amplitudes)

    def apply_pair_op(self, matrix4: np.ndarray, pair: tuple[int, int]) -> "PureState":
        """Apply a 4x4 operator (not necessarily unitary) to a qubit pair."""
        op = embed_operator(np.asarray(matrix4, dtype=complex), pair, self.n_qubits)
        return PureState(self.n_qubits, op @ self.amplitudes)

    def scale(self, factor: complex) -> "PureState":
        return PureState(self.n_qubits, factor * self.amplitudes)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def remove_qubit(self, target: int, outcome: int) -> "PureState":
        """Project a qubit onto a computational outcome and drop it (unnormalized)."""
        if self.n_qubits < 2:
            raise ValueError("cannot remove the last qubit")
        ten = self.amplitudes.reshape([2] * self.n_qubits)
        sub = np.take(ten, outcome, axis=target)
        return PureState(self.n_qubits - 1, sub.reshape(-1))


@dataclass(frozen=True)
class DensityMatrix:
    """A (possibly sub-normalized) density matrix on ``n_qubits`` qubits."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        _check_n_qubits(self.n_qubits)
        m = np.asarray(self.matrix, dtype=complex)
        dim = 2 ** self.n_qubits
        if m.shape != (dim, dim):
            raise ValueError("density matrix must be 2**n x 2**n")
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> "DensityMatrix":
        tr = self.trace
        if tr <= 0.0:
            raise ValueError("cannot normalize a zero-trace matrix")
        return DensityMatrix(self.n_qubits, self.matrix / tr)

    def is_valid(self, tol_herm: float = EPS, tol_psd: float = -PSD_FLOOR) -> bool:
        """Hermitian within tol, eigenvalues above the PSD floor, trace <= 1."""
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol_herm:
            return False
        eigs = np.linalg.eigvalsh((m + m.conj().T) / 2)
        if eigs.min() < -tol_psd:
            return False
        return self.trace <= 1.0 + EPS

    def apply_gate(self, g, target: int) -> "DensityMatrix":
        op = embed_operator(_as_gate(g), (target,), self.n_qubits)
        return DensityMatrix(self.n_qubits, op @ self.matrix @ op.conj().T)

    def apply_pair_op(self, matrix4: np.ndarray, pair: tuple[int, int]) -> "DensityMatrix":
        op = embed_operator(np.asarray(matrix4, dtype=complex), pair, self.n_qubits)
        return DensityMatrix(self.n_qubits, op @ self.matrix @ op.conj().T)


def basis_state(n_qubits: int, bits) -> PureState:
    """Computational basis state from a bit sequence, e.g. ``(0, 1)`` -> |01>."""
    bits = tuple(bits)
    if len(bits) != n_qubits:
        raise ValueError("bit count must equal n_qubits")
    index = 0
    for b in bits:
        index = 2 * index + int(b)
    amps = np.zeros(2 ** n_qubits, dtype=complex)
    amps[index] = 1.0
    return PureState(n_qubits, amps)


def bell(label: BellLabel) -> PureState:
    """One of the four Bell states on two qubits."""
    amps = np.zeros(4, dtype=complex)
    if label is BellLabel.PHI_PLUS:
        amps[0] = amps[3] = 1 / np.sqrt(2)
    elif label is BellLabel.PHI_MINUS:
        amps[0], amps[3] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    elif label is BellLabel.PSI_PLUS:
        amps[1] = amps[2] = 1 / np.sqrt(2)
    else:
        amps[1], amps[2] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    return PureState(2, amps)


def tensor(a, b):
    """Tensor product; the first factor supplies the most significant qubits."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        n = a.n_qubits + b.n_qubits
        _check_n_qubits(n)
        return PureState(n, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        n = a.n_qubits + b.n_qubits
        _check_n_qubits(n)
        return DensityMatrix(n, np.kron(a.matrix, b.matrix))
    raise TypeError("tensor requires two PureState or two DensityMatrix values")


def embed_operator(op: np.ndarray, targets, n_qubits: int) -> np.ndarray:
    """Embed a k-qubit operator acting on ``targets`` into the full register."""
    targets = tuple(targets)
    k = len(targets)
    if len(set(targets)) != k or any(t < 0 or t >= n_qubits for t in targets):
        raise ValueError("invalid target qubits")
    if op.shape != (2 ** k, 2 ** k):
        raise ValueError("operator dimension does not match target count")
    ten = np.eye(2 ** n_qubits, dtype=complex).reshape([2] * (2 * n_qubits))
    opt = np.asarray(op, dtype=complex).reshape([2] * (2 * k))
    # Contract the operator's input axes with the identity's output axes at
    # the target positions, then restore axis order.
    ten = np.tensordot(opt, ten, axes=(list(range(k, 2 * k)), list(targets)))
    rest = [q for q in range(n_qubits) if q not in targets]
    pos = {q: i for i, q in enumerate(targets)}
    pos.update({q: k + i for i, q in enumerate(rest)})
    perm = [pos[q] for q in range(n_qubits)] + list(range(n_qubits, 2 * n_qubits))
    return ten.transpose(perm).reshape(2 ** n_qubits, 2 ** n_qubits)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every qubit not in ``keep`` (result keeps the original order)."""
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep set must be non-empty")
    n = rho.n_qubits
    if any(q < 0 or q >= n for q in keep):
        raise ValueError("keep indices out of range")
    ten = rho.matrix.reshape([2] * (2 * n))
    row = list(range(n))
    col = [q + n if q in keep else q for q in range(n)]
    out = [q for q in keep] + [q + n for q in keep]
    reduced = np.einsum(ten, row + col, out)
    k = len(keep)
    return DensityMatrix(k, reduced.reshape(2 ** k, 2 ** k))


def measure_qubit(state: PureState, target: int):
    """Projective Z measurement; returns [(outcome, unnormalized post, prob)]."""
    if target < 0 or target >= state.n_qubits:
        raise ValueError("target out of range")
    results = []
    ten = state.amplitudes.reshape([2] * state.n_qubits)
    for outcome in (0, 1):
        proj = np.zeros_like(ten)
        idx = [slice(None)] * state.n_qubits
        idx[target] = outcome
        proj[tuple(idx)] = ten[tuple(idx)]
        post = PureState(state.n_qubits, proj.reshape(-1))
        results.append((outcome, post, post.norm2))
    return results


def fidelity(state, ideal: PureState) -> float:
    """Overlap fidelity <ideal|rho|ideal> (|<ideal|psi>|^2 for pure input)."""
    if isinstance(state, PureState):
        if state.n_qubits != ideal.n_qubits:
            raise ValueError("dimension mismatch")
        return float(abs(np.vdot(ideal.amplitudes, state.amplitudes)) ** 2)
    if isinstance(state, DensityMatrix):
        if state.n_qubits != ideal.n_qubits:
            raise ValueError("dimension mismatch")
        v = ideal.amplitudes
        return float(np.real(np.vdot(v, state.matrix @ v)))
    raise TypeError("state must be PureState or DensityMatrix")
