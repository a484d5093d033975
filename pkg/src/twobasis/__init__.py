"""Two-measurement-basis pure-state tomography toolkit."""

from .bases import (
    AngleSet,
    CheckResult,
    MeasurementBasis,
    Witness,
    build_unitary,
    check_local_constraints,
    check_qudit_constraints,
    computational_basis,
    explicit_angles,
    gen_geometric,
    gen_sqrt_prime,
    mask_to_support,
    plain_hadamard_basis,
    qubit_local_basis,
    qudit_fourier_basis,
    verified,
)
from .measure import (
    NoiseModel,
    ProbDist,
    apply_bitflip,
    apply_depolarizing,
    apply_noise,
    prob_computational,
    prob_in_basis,
    prob_oracle,
    prob_plain_hadamard,
    prob_qubit_second,
    prob_qudit_second,
    sample_shots,
)
from .reconstruct import (
    ReconstructionConfig,
    ReconstructionResult,
    amplitudes_from_P,
    anneal,
    candidate_distributions,
    derive_seed,
    epsilon_prob,
    multi_restart,
    propose,
)
from .state import (
    PrecisionSpec,
    PureState,
    QuantizationError,
    SparseSupport,
    fidelity,
    from_amplitudes,
    from_polar,
    ghz_like,
    quantize,
    random_state,
    support_of,
    w_like,
)
from .uniqueness import (
    DeltaDecomposition,
    ZeroPhaseCertificate,
    certify_zero_phase,
    delta_q_decompose,
    exhaustive_match,
    ghz_twin,
    phase_grid_membership,
    reflection_twin,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
