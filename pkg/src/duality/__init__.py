"""Wave-particle duality measures for partially distinguishable bosons and fermions."""

from .combinatorics import ModeOccupation, Permutation, Transversal, right_transversal
from .dynamics import (
    BoseHubbardParams,
    Povm,
    bose_hubbard_hamiltonian,
    interference_decomposition,
    lift_single_particle,
    measure,
    permuted_statistics,
    povm_helstrom,
    povm_kpoint,
    povm_occupation,
)
from .errors import (
    ConfigError,
    Degenerate,
    DualityError,
    InvariantViolation,
    LabelMismatch,
    NonPhysical,
    PauliViolation,
    StateValidationError,
)
from .io import load_state, parse_state
from .measures import (
    MeasureReport,
    ProbDist,
    bhattacharyya,
    classical_particle_measures,
    distinguishability_measures,
    ideal_fidelity_lambda,
    kolmogorov,
    measure_report,
    pairwise_fidelity,
    particle_fidelity,
    particle_trace,
    visibilities,
    wave_coherence,
    wave_purity,
)
from .states import (
    ExternalState,
    InternalState,
    ParticleKind,
    PreparedState,
    external_state,
    random_prepared_state,
    reduced_external,
    reduced_internal,
)

__version__ = "0.1.0"
