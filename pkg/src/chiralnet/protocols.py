"""Network primitives composed from parity measurements.

Implements entanglement purification, Bell-state analysis / entanglement
swapping, and the teleportation-based CZ gate.  The parity measurement is
injected as a :class:`ParityMeasurement` strategy (ideal projective,
one-click, two-click, or their dephased variants), so every protocol can be
evaluated under every noise model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import parity as pa
from .dephase import DephasingParams, one_click_dephased_kraus, two_click_dephased_kraus
from .qstate import (
    BellLabel,
    DensityMatrix,
    HADAMARD,
    PureState,
    R_HALF_PI,
    SIGMA_X,
    SIGMA_Z,
    U_A,
    U_B,
    bell,
    embed_operator,
    fidelity,
    partial_trace,
    tensor,
)
from .scatter import EmitterParams, transmission

__all__ = [
    "PairState",
    "ParityMeasurement",
    "IdealParity",
    "OneClickParity",
    "TwoClickParity",
    "DephasedOneClickParity",
    "DephasedTwoClickParity",
    "BellBranch",
    "SwapBranch",
    "CzReport",
    "purify",
    "bell_measure",
    "entanglement_swap",
    "swap_success_average",
    "teleported_cz",
    "branch_factors",
    "werner_pair",
    "bell_diagonal_pair",
]


@dataclass(frozen=True)
class PairState:
    """A two-qubit entangled pair shared between two parties."""

    rho: DensityMatrix

    def __post_init__(self):
        if self.rho.n_qubits != 2:
            raise ValueError("PairState must hold exactly 2 qubits")

    def fidelity_to(self, label: BellLabel = BellLabel.PHI_PLUS) -> float:
        return fidelity(self.rho, bell(label))


class ParityMeasurement:
    """Strategy interface: heralded parity outcome -> Kraus operators (4x4).

    ``branches()`` returns ``[(kind, [K, ...]), ...]``; probabilities follow
    from the operators themselves.  Fail branches whose operators are not
    listed (pure photon loss) appear only as a probability deficit.
    """

    def branches(self) -> list[tuple[pa.ParityKind, list[np.ndarray]]]:
        raise NotImplementedError


class IdealParity(ParityMeasurement):
    def branches(self):
        return [
            (pa.ParityKind.EVEN, [pa.ideal_projector(pa.ParityKind.EVEN)]),
            (pa.ParityKind.ODD, [pa.ideal_projector(pa.ParityKind.ODD)]),
        ]


class OneClickParity(ParityMeasurement):
    def __init__(self, p0: EmitterParams, p1: EmitterParams):
        self.p0, self.p1 = p0, p1

    def branches(self):
        k = pa.one_click_kraus(transmission(self.p0), transmission(self.p1))
        return [(pa.ParityKind.EVEN, [k[pa.ParityKind.EVEN]]),
                (pa.ParityKind.ODD, [k[pa.ParityKind.ODD]])]


class TwoClickParity(ParityMeasurement):
    def __init__(self, p0: EmitterParams, p1: EmitterParams):
        self.p0, self.p1 = p0, p1

    def branches(self):
        k = pa.two_click_kraus(transmission(self.p0), transmission(self.p1))
        return [(pa.ParityKind.EVEN, [k[(0, 0)]]),
                (pa.ParityKind.ODD, [k[(1, 1)]]),
                (pa.ParityKind.FAIL, [k[(0, 1)], k[(1, 0)]])]


class DephasedOneClickParity(ParityMeasurement):
    def __init__(self, d: DephasingParams):
        self.d = d

    def branches(self):
        k = one_click_dephased_kraus(self.d)
        return [(pa.ParityKind.EVEN, k[pa.ParityKind.EVEN]),
                (pa.ParityKind.ODD, k[pa.ParityKind.ODD])]


class DephasedTwoClickParity(ParityMeasurement):
    def __init__(self, d: DephasingParams):
        self.d = d

    def branches(self):
        k = two_click_dephased_kraus(self.d)
        return [(pa.ParityKind.EVEN, k[(0, 0)]),
                (pa.ParityKind.ODD, k[(1, 1)]),
                (pa.ParityKind.FAIL, k[(0, 1)] + k[(1, 0)])]


def _as_density(state) -> DensityMatrix:
    return state.to_density() if isinstance(state, PureState) else state


def _apply_kraus_pair(rho: DensityMatrix, kraus: list[np.ndarray], pair) -> DensityMatrix:
    total = np.zeros_like(rho.matrix)
    for k in kraus:
        op = embed_operator(k, pair, rho.n_qubits)
        total += op @ rho.matrix @ op.conj().T
    return DensityMatrix(rho.n_qubits, total)


def _measure_density(rho: DensityMatrix, target: int):
    """Z measurement on a density matrix; returns [(outcome, sub-normalized rho)]."""
    out = []
    for outcome in (0, 1):
        proj = np.zeros((2, 2), dtype=complex)
        proj[outcome, outcome] = 1.0
        op = embed_operator(proj, (target,), rho.n_qubits)
        out.append((outcome, DensityMatrix(rho.n_qubits, op @ rho.matrix @ op.conj().T)))
    return out


def purify(joint: DensityMatrix, parity_impl: ParityMeasurement):
    """Distill one pair from two; returns ``(success_prob, PairState)``.

    Register layout: qubits 0,1 are at party A and qubits 2,3 at party B; the
    entangled pairs span (0,2) and (1,3).  Both parties pre-rotate, measure
    the parity of their local qubits, keep the state only when the parities
    agree, then erase qubits 1 and 3 with a pi/2 rotation, measurement, and a
    conditional sigma_z on their partners.  The surviving pair is (0,2)
    returned in that order.
    """
    if joint.n_qubits != 4:
        raise ValueError("purify requires a 4-qubit register")
    rho = joint
    for q in (0, 1):
        rho = rho.apply_gate(U_A, q)
    for q in (2, 3):
        rho = rho.apply_gate(U_B, q)

    branches = parity_impl.branches()
    success_prob = 0.0
    dim = 2 ** 4
    kept = np.zeros((dim, dim), dtype=complex)
    for kind_a, kraus_a in branches:
        if kind_a is pa.ParityKind.FAIL:
            continue
        rho_a = _apply_kraus_pair(rho, kraus_a, (0, 1))
        for kind_b, kraus_b in branches:
            if kind_b is not kind_a:
                continue
            rho_ab = _apply_kraus_pair(rho_a, kraus_b, (2, 3))
            success_prob += rho_ab.trace
            kept += rho_ab.matrix
    rho_kept = DensityMatrix(4, kept)

    rho_kept = rho_kept.apply_gate(R_HALF_PI, 1).apply_gate(R_HALF_PI, 3)
    dim2 = 2 ** 2
    out = np.zeros((dim2, dim2), dtype=complex)
    for m1, rho1 in _measure_density(rho_kept, 1):
        r = rho1.apply_gate(SIGMA_Z, 0) if m1 == 1 else rho1
        for m3, rho3 in _measure_density(r, 3):
            r2 = rho3.apply_gate(SIGMA_Z, 2) if m3 == 1 else rho3
            out += partial_trace(r2, (0, 2)).matrix
    if success_prob <= 0.0:
        raise ValueError("purification never succeeds for this input")
    return success_prob, PairState(DensityMatrix(2, out / success_prob))


@dataclass(frozen=True)
class BellBranch:
    label: BellLabel
    prob: float
    photon_outcome: pa.ParityKind        # EVEN = Detector 0 pattern, ODD = Detector 1
    spin_outcomes: tuple[int, int]
    post: DensityMatrix | None           # remaining register, normalized (None if empty)


_LABEL_RULE = {
    (pa.ParityKind.EVEN, True): BellLabel.PHI_PLUS,
    (pa.ParityKind.EVEN, False): BellLabel.PHI_MINUS,
    (pa.ParityKind.ODD, True): BellLabel.PSI_PLUS,
    (pa.ParityKind.ODD, False): BellLabel.PSI_MINUS,
}


def bell_measure(state, parity_impl: ParityMeasurement, pair=(0, 1)) -> list[BellBranch]:
    """Bell-state analysis on a qubit pair: parity, pi/2 rotations, Z readout.

    The photon pattern distinguishes the phi/psi subspaces and the equality
    of the two spin outcomes distinguishes + from -.  Returns every heralded
    branch (Fail branches are omitted; their weight is the probability
    deficit).
    """
    rho = _as_density(state)
    a, b = pair
    rest = [q for q in range(rho.n_qubits) if q not in pair]
    out = []
    for kind, kraus in parity_impl.branches():
        if kind is pa.ParityKind.FAIL:
            continue
        rk = _apply_kraus_pair(rho, kraus, pair)
        rk = rk.apply_gate(R_HALF_PI, a).apply_gate(R_HALF_PI, b)
        for ma, rho_a in _measure_density(rk, a):
            for mb, rho_ab in _measure_density(rho_a, b):
                prob = rho_ab.trace
                if prob <= 1e-15:
                    continue
                label = _LABEL_RULE[(kind, ma == mb)]
                post = partial_trace(rho_ab, rest).normalized() if rest else None
                out.append(BellBranch(label, prob, kind, (ma, mb), post))
    return out


@dataclass(frozen=True)
class SwapBranch:
    label: BellLabel
    prob: float
    pair: PairState      # A-C pair after the label-dependent correction


# Pauli correction on the C-side qubit turning Bell state `label` into phi+.
_SWAP_CORRECTION = {
    BellLabel.PHI_PLUS: np.eye(2, dtype=complex),
    BellLabel.PHI_MINUS: SIGMA_Z,
    BellLabel.PSI_PLUS: SIGMA_X,
    BellLabel.PSI_MINUS: SIGMA_Z @ SIGMA_X,
}


def entanglement_swap(left: PairState, right: PairState,
                      parity_impl: ParityMeasurement) -> list[SwapBranch]:
    """Bell measurement at the middle node; returns all heralded branches.

    ``left`` spans A-B and ``right`` spans B-C.  The label-dependent Pauli
    correction is applied to the C-side qubit so that ideal inputs always
    yield phi+ on A-C; the raw label is still reported.
    """
    full = tensor(left.rho, right.rho)   # qubits: A, B1, B2, C
    out = []
    for br in bell_measure(full, parity_impl, pair=(1, 2)):
        pair_rho = br.post.apply_gate(_SWAP_CORRECTION[br.label], 1)
        out.append(SwapBranch(br.label, br.prob, PairState(pair_rho)))
    return out


def swap_success_average(branches: list[SwapBranch]) -> tuple[float, PairState]:
    """Success probability and probability-weighted A-C pair over branches."""
    total = sum(b.prob for b in branches)
    mix = sum(b.prob * b.pair.rho.matrix for b in branches) / total
    return total, PairState(DensityMatrix(2, mix))


def branch_factors(t0: complex, t1: complex) -> tuple[complex, complex, complex]:
    """The three amplitude factors of the two-click heralded operators:
    even-subspace transmission alpha, even-subspace error epsilon, and the
    odd-subspace factor eta (P_odd = |eta|^2 / 2 on a parity-balanced input).
    """
    alpha = (t0 + t1) / 2.0
    epsilon = (1.0 + t0) * (1.0 + t1) / 4.0
    eta = (1.0 - t0) * (t1 - 1.0) / 4.0
    return alpha, epsilon, eta


@dataclass(frozen=True)
class CzReport:
    branch_probs: dict[tuple[pa.ParityKind, pa.ParityKind], float]
    branch_fidelities: dict[tuple[pa.ParityKind, pa.ParityKind], float]
    overall_fidelity: float
    success_prob: float


_CZ_4 = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def _erase_qubit(rho: DensityMatrix, target: int, partner: int) -> DensityMatrix:
    """Erase a resource qubit: Hadamard, Z measurement, conditional sigma_z on
    the partner, then trace out the measured qubit."""
    rho = rho.apply_gate(HADAMARD, target)
    keep = [q for q in range(rho.n_qubits) if q != target]
    total = np.zeros((2 ** (rho.n_qubits - 1),) * 2, dtype=complex)
    for m, rm in _measure_density(rho, target):
        r = rm.apply_gate(SIGMA_Z, partner) if m == 1 else rm
        total += partial_trace(r, keep).matrix
    return DensityMatrix(rho.n_qubits - 1, total)


def _cz_ideal_output(state: PureState) -> PureState:
    """Ideal result on (logical, logical, spectators...) given the full input."""
    n = state.n_qubits
    # Contract the phi+ resource on qubits (0, 2).
    ten = state.amplitudes.reshape([2] * n)
    reduced = (np.take(np.take(ten, 0, axis=0), 0, axis=1)
               + np.take(np.take(ten, 1, axis=0), 1, axis=1)) / np.sqrt(2)
    logical = PureState(n - 2, reduced.reshape(-1)).normalized()
    return logical.apply_pair_op(_CZ_4, (0, 1))


def teleported_cz(state: PureState, parity_impl: ParityMeasurement) -> CzReport:
    """Teleportation-based CZ between the logical qubits.

    Register layout: qubit 0 and qubit 2 hold the phi+ resource pair, qubits
    1 and 3 are the logical qubits; any further qubits are untouched
    spectators.  Sequence: parity(0,1) with sigma_x on 0 and 2 on Odd;
    Hadamard on 2; parity(2,3) with sigma_x on 2 and sigma_z on 1 on Odd;
    erase qubit 0 (conditional sigma_z on 1) and qubit 2 (conditional sigma_z
    on 3).  The ideal limit realizes CZ between qubits 1 and 3 exactly.
    """
    if state.n_qubits < 4:
        raise ValueError("requires at least 4 qubits")
    resource = partial_trace(state.to_density(), (0, 2))
    if fidelity(resource, bell(BellLabel.PHI_PLUS)) < 1.0 - 1e-9:
        raise ValueError("resource qubits (0, 2) must be in the phi+ Bell state")

    ideal = _cz_ideal_output(state)
    rho0 = state.to_density()
    branches = parity_impl.branches()
    probs: dict[tuple[pa.ParityKind, pa.ParityKind], float] = {}
    fids: dict[tuple[pa.ParityKind, pa.ParityKind], float] = {}
    for k1, kraus1 in branches:
        if k1 is pa.ParityKind.FAIL:
            continue
        r1 = _apply_kraus_pair(rho0, kraus1, (0, 1))
        if k1 is pa.ParityKind.ODD:
            r1 = r1.apply_gate(SIGMA_X, 0).apply_gate(SIGMA_X, 2)
        r1 = r1.apply_gate(HADAMARD, 2)
        for k2, kraus2 in branches:
            if k2 is pa.ParityKind.FAIL:
                continue
            r2 = _apply_kraus_pair(r1, kraus2, (2, 3))
            if k2 is pa.ParityKind.ODD:
                r2 = r2.apply_gate(SIGMA_X, 2).apply_gate(SIGMA_Z, 1)
            r2 = _erase_qubit(r2, 0, 1)      # erase resource qubit 0, sigma_z on logical 1
            r2 = _erase_qubit(r2, 1, 2)      # erase old qubit 2 (now 1), sigma_z on old 3 (now 2)
            prob = r2.trace
            key = (k1, k2)
            probs[key] = prob
            fids[key] = fidelity(r2.normalized(), ideal) if prob > 0 else 0.0
    success = sum(probs.values())
    overall = sum(probs[k] * fids[k] for k in probs) / success if success > 0 else 0.0
    return CzReport(probs, fids, overall, success)


def werner_pair(f: float) -> PairState:
    """Werner state with phi+ fidelity ``f`` (remaining weight isotropic)."""
    if not (0.0 <= f <= 1.0):
        raise ValueError("fidelity must be in [0, 1]")
    return bell_diagonal_pair({BellLabel.PHI_PLUS: f,
                               BellLabel.PHI_MINUS: (1 - f) / 3,
                               BellLabel.PSI_PLUS: (1 - f) / 3,
                               BellLabel.PSI_MINUS: (1 - f) / 3})


def bell_diagonal_pair(weights: dict[BellLabel, float]) -> PairState:
    """Mixture of Bell states with the given weights (must sum to 1)."""
    total = sum(weights.values())
    if abs(total - 1.0) > 1e-9 or any(w < 0 for w in weights.values()):
        raise ValueError("weights must be non-negative and sum to 1")
    mat = np.zeros((4, 4), dtype=complex)
    for label, w in weights.items():
        v = bell(label).amplitudes
        mat += w * np.outer(v, v.conj())
    return PairState(DensityMatrix(2, mat))
