"""Single-excitation quantum walks on networks of lossy atom-cavity nodes."""

from .classical import ProbabilityDistribution, rw_step, rw_transition_matrix
from .config import SimulationConfig, load_config
from .dynamics import (
    AmplitudeState,
    DensityState,
    SystemParams,
    assemble_eta,
    closed_form_factors,
    density_state,
    initial_excitation,
    propagator_closed_form,
    propagator_generic,
    step,
    step_propagator,
)
from .errors import CavityWalkError, ConfigError, NumericalInvariantError
from .graphs import NetworkGraph, NodeCoord, build_moebius, build_torus, coupling_matrix, load_custom
from .witnesses import EntanglementReport, WitnessKind, report, w_separable_bound

__version__ = "0.1.0"
