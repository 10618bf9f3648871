"""Single-photon scattering through the two-emitter Mach-Zehnder interferometer.

The photon is dual-rail encoded: ``|0>_ph`` is a photon in Arm0 (top arm,
containing emitter 0) and ``|1>_ph`` a photon in Arm1 (bottom arm, emitter 1).
The photon always enters through Arm1.  Each emitter imprints its complex
transmission coefficient ``t_j`` on the photon amplitude only when the spin in
its arm is in ``|1>``; the ``|0>`` spin component is transparent.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qstate import EPS, PureState

__all__ = [
    "EmitterParams",
    "PhotonRail",
    "BranchOutcome",
    "Branch",
    "BEAMSPLITTER",
    "transmission",
    "beamsplitter_rail",
    "mzi_scatter",
    "ideal_emitter",
]

# 50:50 beamsplitter on the rail qubit: |0> -> (|0> + i|1>)/sqrt(2),
# |1> -> (i|0> + |1>)/sqrt(2).
BEAMSPLITTER = np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class EmitterParams:
    """Physical parameters of one chiral emitter.

    ``beta`` is the directional coupling fraction, ``delta`` the detuning in
    units of ``gamma_r``, ``gamma_r`` the rightward decay rate, and
    ``beta_c_inc`` the incoherent-scattering fraction used by the dephasing
    model only.
    """

    beta: float
    delta: float = 0.0
    gamma_r: float = 1.0
    beta_c_inc: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.beta <= 1.0):
            raise ValueError("beta must be in (0, 1]")
        if self.gamma_r <= 0.0:
            raise ValueError("gamma_r must be positive")
        if not (0.0 <= self.beta_c_inc < 1.0):
            raise ValueError("beta_c_inc must be in [0, 1)")


def ideal_emitter() -> EmitterParams:
    """A perfectly coupled, resonant emitter (t = -1)."""
    return EmitterParams(beta=1.0, delta=0.0)


class PhotonRail(Enum):
    ARM0 = 0
    ARM1 = 1


class BranchOutcome(Enum):
    DETECTOR0 = 0
    DETECTOR1 = 1
    LOST = "lost"


@dataclass(frozen=True)
class Branch:
    """A heralded outcome: detector label, attached state, and probability."""

    outcome: BranchOutcome
    state: object  # PureState or DensityMatrix over the spin register (None for LOST)
    prob: float


def transmission(p: EmitterParams) -> complex:
    """Coherent transmission coefficient t = 1 - 2*beta / (1 - 2i*beta*delta)."""
    return 1.0 - 2.0 * p.beta / (1.0 - 2.0j * p.beta * p.delta)


def beamsplitter_rail(state: PureState, rail_qubit: int) -> PureState:
    """Apply the 50:50 beamsplitter unitary to the dual-rail photon qubit."""
    return state.apply_gate(BEAMSPLITTER, rail_qubit)


def mzi_scatter(spins: PureState, photon_in: PhotonRail,
                t0: complex, t1: complex):
    """Closed-form interferometer output for one photon pass.

    Returns ``(branch0, branch1, lost_prob)`` where ``branch0``/``branch1``
    are the unnormalized two-spin states attached to a Detector 0 / Detector 1
    click and ``lost_prob`` is the probability deficit (photon scattered out
    of the guided modes).  No single-qubit corrections are applied here; the
    protocol layer adds them.
    """
    if spins.n_qubits != 2:
        raise ValueError("mzi_scatter requires a 2-qubit spin state")
    if photon_in is not PhotonRail.ARM1:
        raise ValueError("the photon is injected through Arm1 only")
    c = spins.amplitudes
    half = 0.5
    br0 = np.array([
        c[0],
        half * (t1 + 1.0) * c[1],
        half * (t0 + 1.0) * c[2],
        half * (t0 + t1) * c[3],
    ], dtype=complex)
    br1 = np.array([
        0.0,
        half * (t1 - 1.0) * c[1],
        half * (1.0 - t0) * c[2],
        half * (t0 - t1) * c[3],
    ], dtype=complex)
    b0 = PureState(2, br0)
    b1 = PureState(2, br1)
    lost = spins.norm2 - b0.norm2 - b1.norm2
    return b0, b1, max(0.0, lost) if lost > -EPS else lost


def mzi_scatter_branches(spins: PureState, t0: complex, t1: complex) -> list[Branch]:
    """Branch-set form of :func:`mzi_scatter` with probability closure."""
    b0, b1, lost = mzi_scatter(spins, PhotonRail.ARM1, t0, t1)
    return [
        Branch(BranchOutcome.DETECTOR0, b0, b0.norm2),
        Branch(BranchOutcome.DETECTOR1, b1, b1.norm2),
        Branch(BranchOutcome.LOST, None, lost),
    ]
