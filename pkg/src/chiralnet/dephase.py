"""Incoherent (phase-randomizing) scattering model for the parity protocols.

The emitters are perfectly coupled and resonant (no loss), but each
scattering event off a ``|1>`` spin is coherent only with probability
amplitude ``t = -1 + 2 * inc_fraction``.  An incoherent event projects the
register onto the corresponding spin-``|1>`` component and sends the photon
to either detector with probability 1/2 and no phase relation to the
coherent amplitude, so each detector outcome becomes a mixture of one
coherent branch and incoherent branches.

Everything is expressed through per-outcome Kraus operators on the two
spins, so the model composes with the protocol layer exactly like the
coherent parity measurement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .parity import ParityKind, Protocol, _raw_pass_kraus, _XX, _ZQ1, choi_input, ideal_projector
from .qstate import DensityMatrix, PureState, fidelity
from .scatter import BranchOutcome

__all__ = [
    "DephasingParams",
    "one_click_dephased_kraus",
    "two_click_dephased_kraus",
    "scatter_dephased_one_click",
    "scatter_dephased_two_click",
    "cj_fidelity_dephased",
]

# Projectors onto the spin-|1> component of each arm's emitter: an incoherent
# event at emitter 0 (top arm) requires the first spin up, and likewise for
# emitter 1 (bottom arm) and the second spin.
_P_ARM0 = np.diag([0.0, 0.0, 1.0, 1.0]).astype(complex)
_P_ARM1 = np.diag([0.0, 1.0, 0.0, 1.0]).astype(complex)


@dataclass(frozen=True)
class DephasingParams:
    """Incoherent-scattering strength; ``t`` is the coherent transmission."""

    inc_fraction: float

    def __post_init__(self):
        if not (0.0 <= self.inc_fraction < 1.0):
            raise ValueError("inc_fraction must be in [0, 1)")

    @property
    def t(self) -> float:
        return -1.0 + 2.0 * self.inc_fraction


def _raw_dephased_sets(d: DephasingParams):
    """Per-detector Kraus sets for one photon pass, before spin corrections.

    Each incoherent event carries weight (1 - t^2)/4 per detector: probability
    (1 - t^2) for the event itself times 1/2 for the photon's random exit arm,
    split over the projector's two detector copies.
    """
    t = d.t
    m0, m1 = _raw_pass_kraus(t, t)
    w = np.sqrt((1.0 - t * t) / 4.0)
    return {
        0: [m0, w * _P_ARM0, w * _P_ARM1],
        1: [m1, w * _P_ARM0, w * _P_ARM1],
    }


def one_click_dephased_kraus(d: DephasingParams) -> dict[ParityKind, list[np.ndarray]]:
    """Kraus sets per heralded outcome, sigma_z correction included."""
    raw = _raw_dephased_sets(d)
    return {
        ParityKind.EVEN: [_ZQ1 @ k for k in raw[0]],
        ParityKind.ODD: [_ZQ1 @ k for k in raw[1]],
    }


def two_click_dephased_kraus(d: DephasingParams) -> dict[tuple[int, int], list[np.ndarray]]:
    """Kraus sets per detector pattern: both passes may scatter incoherently."""
    raw = _raw_dephased_sets(d)
    return {
        (d1, d2): [_XX @ k2 @ _XX @ k1 for k1 in raw[d1] for k2 in raw[d2]]
        for d1 in (0, 1) for d2 in (0, 1)
    }


def _apply_kraus_set(spins: PureState, kraus: list[np.ndarray]) -> tuple[DensityMatrix, float]:
    dim = 2 ** spins.n_qubits
    total = np.zeros((dim, dim), dtype=complex)
    for k in kraus:
        branch = spins.apply_pair_op(k, (0, 1))
        total += np.outer(branch.amplitudes, branch.amplitudes.conj())
    rho = DensityMatrix(spins.n_qubits, total)
    return rho, rho.trace


def scatter_dephased_one_click(spins: PureState, d: DephasingParams):
    """Mixed-state branches per detector; returns [(outcome, rho, prob)]."""
    if spins.n_qubits != 2:
        raise ValueError("requires a 2-qubit spin state")
    kraus = one_click_dephased_kraus(d)
    out = []
    for outcome, kind in ((BranchOutcome.DETECTOR0, ParityKind.EVEN),
                          (BranchOutcome.DETECTOR1, ParityKind.ODD)):
        rho, prob = _apply_kraus_set(spins, kraus[kind])
        out.append((outcome, rho, prob))
    return out


def scatter_dephased_two_click(spins: PureState, d: DephasingParams):
    """Mixed-state branches per detector pattern; returns [(pattern, rho, prob)]."""
    if spins.n_qubits != 2:
        raise ValueError("requires a 2-qubit spin state")
    kraus = two_click_dephased_kraus(d)
    out = []
    for pattern in ((0, 0), (0, 1), (1, 0), (1, 1)):
        rho, prob = _apply_kraus_set(spins, kraus[pattern])
        out.append((pattern, rho, prob))
    return out


def _embed_pair(spins4: PureState, k: np.ndarray, pair) -> PureState:
    return spins4.apply_pair_op(k, pair)


def cj_fidelity_dephased(protocol: Protocol, d: DephasingParams) -> float:
    """Success-weighted process fidelity under incoherent scattering."""
    spins4, pair = choi_input()
    ideal = {
        kind: spins4.apply_pair_op(ideal_projector(kind), pair).normalized()
        for kind in (ParityKind.EVEN, ParityKind.ODD)
    }
    if protocol is Protocol.ONE_CLICK:
        sets = one_click_dephased_kraus(d)
        pairs = [(ParityKind.EVEN, sets[ParityKind.EVEN]),
                 (ParityKind.ODD, sets[ParityKind.ODD])]
    else:
        sets = two_click_dephased_kraus(d)
        pairs = [(ParityKind.EVEN, sets[(0, 0)]),
                 (ParityKind.ODD, sets[(1, 1)])]
    num = den = 0.0
    for kind, kraus in pairs:
        for k in kraus:
            branch = _embed_pair(spins4, k, pair)
            prob = branch.norm2
            if prob <= 0.0:
                continue
            den += prob
            num += prob * fidelity(branch.normalized(), ideal[kind])
    return num / den
