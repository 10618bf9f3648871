"""Heralded parity measurement via one-click and two-click photon protocols.

Both protocols project a two-spin register toward the even ``{|00>, |11>}``
or odd ``{|01>, |10>}`` parity subspace, heralded by interferometer detector
clicks.  Detector patterns map to outcomes as follows:

* one-click: Detector 0 -> Even, Detector 1 -> Odd, photon loss -> Fail;
* two-click: (0,0) -> Even, (1,1) -> Odd, mixed patterns or any loss -> Fail.

Every heralded outcome is represented by diagonal Kraus operators acting on
the two spins, including the protocol's built-in single-qubit corrections
(a sigma_z on the second qubit after each one-click detection, and sigma_x on
both qubits around the second photon pass of the two-click protocol).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import scatter as sc
from .qstate import (
    BellLabel,
    PureState,
    SIGMA_X,
    SIGMA_Z,
    bell,
    fidelity,
    measure_qubit,
    tensor,
)

__all__ = [
    "Protocol",
    "ParityKind",
    "ParityOutcome",
    "ProtocolReport",
    "one_click",
    "two_click",
    "run_protocol",
    "one_click_kraus",
    "two_click_kraus",
    "success_prob_closed_form",
    "cj_fidelity_closed_form",
    "cj_fidelity_oracle",
    "choi_input",
    "ideal_projector",
]


class Protocol(Enum):
    ONE_CLICK = "one-click"
    TWO_CLICK = "two-click"


class ParityKind(Enum):
    EVEN = "even"
    ODD = "odd"
    FAIL = "fail"


@dataclass(frozen=True)
class ParityOutcome:
    kind: ParityKind
    post: PureState | None   # normalized post-measurement state (None if prob 0 / loss)
    prob: float
    cond_fidelity: float


@dataclass(frozen=True)
class ProtocolReport:
    protocol: Protocol
    success_prob: float
    cj_fidelity: float       # success-weighted average fidelity for this input
    per_outcome: list[ParityOutcome]


_XX = np.kron(SIGMA_X, SIGMA_X)
_ZQ1 = np.kron(np.eye(2, dtype=complex), SIGMA_Z)  # sigma_z on the second qubit


def ideal_projector(kind: ParityKind) -> np.ndarray:
    """Projector onto the even or odd parity subspace of two qubits."""
    if kind is ParityKind.EVEN:
        return np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)
    if kind is ParityKind.ODD:
        return np.diag([0.0, 1.0, 1.0, 0.0]).astype(complex)
    raise ValueError("no projector for Fail")


def _raw_pass_kraus(t0: complex, t1: complex) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal operators for one photon pass, before any spin corrections."""
    m0 = np.diag([1.0, (1.0 + t1) / 2, (1.0 + t0) / 2, (t0 + t1) / 2]).astype(complex)
    m1 = np.diag([0.0, (t1 - 1.0) / 2, (1.0 - t0) / 2, (t0 - t1) / 2]).astype(complex)
    return m0, m1


def one_click_kraus(t0: complex, t1: complex) -> dict[ParityKind, np.ndarray]:
    """Heralded operators for the one-click protocol (sigma_z correction included)."""
    m0, m1 = _raw_pass_kraus(t0, t1)
    return {ParityKind.EVEN: _ZQ1 @ m0, ParityKind.ODD: _ZQ1 @ m1}


def two_click_kraus(t0: complex, t1: complex) -> dict[tuple[int, int], np.ndarray]:
    """Heralded operators for each two-click detector pattern.

    Pattern (d1, d2) composes: first pass conditioned on detector d1, sigma_x
    on both spins, second pass conditioned on d2, sigma_x on both spins.
    """
    raw = _raw_pass_kraus(t0, t1)
    return {
        (d1, d2): _XX @ raw[d2] @ _XX @ raw[d1]
        for d1 in (0, 1) for d2 in (0, 1)
    }


def _parity_projection(spins: PureState, kind: ParityKind) -> PureState:
    return spins.apply_pair_op(ideal_projector(kind), (0, 1))


def _outcome(kind: ParityKind, spins: PureState, branch: PureState) -> ParityOutcome:
    prob = branch.norm2
    if prob <= 0.0:
        return ParityOutcome(kind, None, 0.0, 0.0)
    post = branch.normalized()
    ideal = _parity_projection(spins, kind)
    if ideal.norm2 <= 0.0:
        cond_f = 0.0
    else:
        cond_f = fidelity(post, ideal.normalized())
    return ParityOutcome(kind, post, prob, cond_f)


def _report(protocol: Protocol, spins: PureState,
            even_branch: PureState, odd_branch: PureState,
            fail_prob: float) -> ProtocolReport:
    even = _outcome(ParityKind.EVEN, spins, even_branch)
    odd = _outcome(ParityKind.ODD, spins, odd_branch)
    fail = ParityOutcome(ParityKind.FAIL, None, max(fail_prob, 0.0), 0.0)
    success = even.prob + odd.prob
    avg = 0.0
    if success > 0.0:
        avg = (even.prob * even.cond_fidelity + odd.prob * odd.cond_fidelity) / success
    return ProtocolReport(protocol, success, avg, [even, odd, fail])


def one_click(spins: PureState, p0: sc.EmitterParams, p1: sc.EmitterParams) -> ProtocolReport:
    """One photon pass; a click on either detector heralds a parity outcome."""
    if not spins.is_normalized(1e-9):
        raise ValueError("input spin state must be normalized")
    t0, t1 = sc.transmission(p0), sc.transmission(p1)
    kraus = one_click_kraus(t0, t1)
    even = spins.apply_pair_op(kraus[ParityKind.EVEN], (0, 1))
    odd = spins.apply_pair_op(kraus[ParityKind.ODD], (0, 1))
    return _report(Protocol.ONE_CLICK, spins, even, odd, 1.0 - even.norm2 - odd.norm2)


def two_click(spins: PureState, p0: sc.EmitterParams, p1: sc.EmitterParams) -> ProtocolReport:
    """Two photon passes; matching detector clicks herald a parity outcome.

    Mixed detector patterns contribute to the Fail probability (alongside
    photon loss), as does any loss event.
    """
    if not spins.is_normalized(1e-9):
        raise ValueError("input spin state must be normalized")
    t0, t1 = sc.transmission(p0), sc.transmission(p1)
    kraus = two_click_kraus(t0, t1)
    even = spins.apply_pair_op(kraus[(0, 0)], (0, 1))
    odd = spins.apply_pair_op(kraus[(1, 1)], (0, 1))
    return _report(Protocol.TWO_CLICK, spins, even, odd, 1.0 - even.norm2 - odd.norm2)


def run_protocol(protocol: Protocol, spins: PureState,
                 p0: sc.EmitterParams, p1: sc.EmitterParams) -> ProtocolReport:
    fn = one_click if protocol is Protocol.ONE_CLICK else two_click
    return fn(spins, p0, p1)


def success_prob_closed_form(protocol: Protocol, beta: float) -> float:
    """Success probability for equal resonant emitters (delta = 0)."""
    if protocol is Protocol.ONE_CLICK:
        return 0.25 * (1.0 + (1.0 - 2.0 * beta) ** 2
                       + 2.0 * beta ** 2 + 2.0 * (1.0 - beta) ** 2)
    return 0.5 * ((1.0 - 2.0 * beta) ** 2 + beta ** 4 + (1.0 - beta) ** 4)


def cj_fidelity_closed_form(protocol: Protocol, t0: complex, t1: complex) -> float:
    """Process fidelity as a rational function of the transmission coefficients."""
    a_plus0 = abs(1.0 + t0) ** 2
    a_plus1 = abs(1.0 + t1) ** 2
    a_minus0 = abs(1.0 - t0) ** 2
    a_minus1 = abs(1.0 - t1) ** 2
    a_sum = abs(t0 + t1) ** 2
    a_diff = abs(t0 - t1) ** 2
    if protocol is Protocol.ONE_CLICK:
        num = abs(1.0 - (t0 + t1) / 2.0) ** 2
        den = 1.0 + (a_sum + a_plus1 + a_plus0 + a_minus0 + a_minus1 + a_diff) / 4.0
        return num / den
    return 1.0 - a_plus1 * a_plus0 / (a_plus1 * a_plus0 + a_minus1 * a_minus0 + 4.0 * a_sum)


def choi_input() -> tuple[PureState, tuple[int, int]]:
    """Two Bell pairs |phi+>_{01} |phi+>_{23}; the measured pair is (1, 2)."""
    state = tensor(bell(BellLabel.PHI_PLUS), bell(BellLabel.PHI_PLUS))
    return state, (1, 2)


def _ideal_swapped(kind: ParityKind) -> PureState:
    """Ideal post-parity state of the 4-qubit process-fidelity register."""
    spins4, pair = choi_input()
    return spins4.apply_pair_op(ideal_projector(kind), pair).normalized()


def _scatter_on_register(state: PureState, rail: int,
                         arm0_spin: int, arm1_spin: int,
                         t0: complex, t1: complex) -> PureState:
    """Conditional transmission: amplitude factor t_j when the photon occupies
    arm j and the spin in that arm is |1>."""
    n = state.n_qubits
    ten = state.amplitudes.reshape([2] * n).copy()
    idx = [slice(None)] * n
    idx[rail], idx[arm0_spin] = 0, 1
    ten[tuple(idx)] *= t0
    idx = [slice(None)] * n
    idx[rail], idx[arm1_spin] = 1, 1
    ten[tuple(idx)] *= t1
    return PureState(n, ten.reshape(-1))


def _photon_pass(state: PureState, rail: int, pair: tuple[int, int],
                 t0: complex, t1: complex) -> PureState:
    """Full interferometer pass: beamsplitter, conditional scattering, beamsplitter."""
    state = sc.beamsplitter_rail(state, rail)
    state = _scatter_on_register(state, rail, pair[0], pair[1], t0, t1)
    return sc.beamsplitter_rail(state, rail)


def cj_fidelity_oracle(protocol: Protocol,
                       p0: sc.EmitterParams, p1: sc.EmitterParams) -> float:
    """Ground-truth process fidelity by explicit photon-register simulation.

    Builds the four-qubit maximally entangled input, appends a dual-rail
    photon qubit, runs beamsplitter/conditional-scattering/beamsplitter passes
    with projective rail detection, applies the protocol's spin corrections,
    and averages the branch fidelities against the ideal parity projections.
    """
    t0, t1 = sc.transmission(p0), sc.transmission(p1)
    spins4, pair = choi_input()
    photon = PureState(1, np.array([0.0, 1.0], dtype=complex))  # enters Arm1
    ideal = {ParityKind.EVEN: _ideal_swapped(ParityKind.EVEN),
             ParityKind.ODD: _ideal_swapped(ParityKind.ODD)}

    if protocol is Protocol.ONE_CLICK:
        full = tensor(spins4, photon)
        full = _photon_pass(full, 4, pair, t0, t1)
        num = den = 0.0
        for detector, kind in ((0, ParityKind.EVEN), (1, ParityKind.ODD)):
            branch = full.remove_qubit(4, detector)
            branch = branch.apply_gate(SIGMA_Z, pair[1])
            prob = branch.norm2
            if prob <= 0.0:
                continue
            den += prob
            num += prob * fidelity(branch.normalized(), ideal[kind])
        return num / den

    num = den = 0.0
    for detector, kind in ((0, ParityKind.EVEN), (1, ParityKind.ODD)):
        full = tensor(spins4, photon)
        full = _photon_pass(full, 4, pair, t0, t1)
        branch = full.remove_qubit(4, detector)
        branch = branch.apply_gate(SIGMA_X, pair[0]).apply_gate(SIGMA_X, pair[1])
        full2 = tensor(branch, photon)
        full2 = _photon_pass(full2, 4, pair, t0, t1)
        branch2 = full2.remove_qubit(4, detector)
        branch2 = branch2.apply_gate(SIGMA_X, pair[0]).apply_gate(SIGMA_X, pair[1])
        prob = branch2.norm2
        if prob <= 0.0:
            continue
        den += prob
        num += prob * fidelity(branch2.normalized(), ideal[kind])
    return num / den
