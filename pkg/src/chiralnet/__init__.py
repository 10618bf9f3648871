"""Simulation of chiral-waveguide Mach-Zehnder parity measurements and the
network protocols built on them (purification, entanglement swapping, and a
teleportation-based CZ gate), with closed-form results cross-checked against
brute-force state and density-matrix enumeration.
"""

__version__ = "0.1.0"

from .qstate import (  # noqa: F401
    BellLabel,
    DensityMatrix,
    GateName,
    PureState,
    bell,
    basis_state,
    fidelity,
    measure_qubit,
    partial_trace,
    tensor,
)
from .scatter import EmitterParams, PhotonRail, transmission, mzi_scatter  # noqa: F401
from .parity import (  # noqa: F401
    Protocol,
    ProtocolReport,
    one_click,
    two_click,
    success_prob_closed_form,
    cj_fidelity_closed_form,
    cj_fidelity_oracle,
)
from .pulse import PulseSpec, cj_fidelity_pulse, cj_infidelity_asymptote  # noqa: F401
from .dephase import DephasingParams, cj_fidelity_dephased  # noqa: F401
from .protocols import (  # noqa: F401
    IdealParity,
    OneClickParity,
    PairState,
    TwoClickParity,
    bell_measure,
    entanglement_swap,
    purify,
    teleported_cz,
    werner_pair,
)
from .netsim import ChainConfig, LinkModel, RunStats, run_chain, run_many  # noqa: F401
