"""Optically pumped, microwave-driven NV-center to 13C polarization transfer.

Six-level (electron spin 1 x nuclear spin 1/2) density-matrix simulations of
eigenstate populations and nuclear polarization under continuous microwave
drive and laser pumping, at arbitrary field strengths and orientations.
"""

from .spin_ops import FieldVector, field_components, is_hermitian, is_unitary, kron, spin_operators
from .hamiltonian import (
    GAMMA_13C,
    GAMMA_E,
    AntiCrossingWarning,
    HyperfineTensor,
    LabelingWarning,
    ManifoldStructure,
    RWAWarning,
    SecularityWarning,
    SystemParams,
    Transition,
    build_lab_hamiltonian,
    build_secular_hamiltonian,
    manifold_structure,
    rotating_frame,
    transition_table,
)
from .lindblad import (
    DegenerateGeneratorError,
    NonUniqueSteadyStateWarning,
    NumericalFailure,
    PumpModel,
    build_liouvillian,
    frame_jump_operators,
    propagate,
    pump_jump_operators,
    steady_state,
)
from .experiments import (
    CombSpec,
    SweepResult,
    SweepSpec,
    classify_regime,
    field_sweep,
    frequency_sweep,
    nuclear_polarization,
    population_spectrum_model,
    power_sweep,
)

__version__ = "0.1.0"
