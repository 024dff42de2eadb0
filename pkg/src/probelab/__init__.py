"""probelab: quantum-limited single-parameter estimation with a fixed readout.

A numerical laboratory for probes built from qubits: constructs symmetric
logarithmic derivative operators, computes classical and quantum Fisher
information, solves for probe states that attain the quantum uncertainty
bound under a fixed per-qubit projective readout, and verifies the resulting
uncertainty scaling by Monte Carlo simulation.
"""

__version__ = "0.1.0"

from .dynamics import (
    ENTANGLING,
    NONENTANGLING,
    Generator,
    ReadoutBasis,
    entangling_generator,
    evolve,
    nonentangling_generator,
    outcome_probabilities,
    product_pm_readout,
    state_derivative,
)
from .errors import (
    ConfigError,
    DegenerateModelError,
    DimensionError,
    ProbeLabError,
    PSDViolationError,
    SingularOutcomeError,
    SLDInconsistencyError,
    UndefinedLambdaError,
    UnsupportedClosedFormError,
    ValidationError,
)
from .fisher import (
    LambdaSpectrum,
    SaturationReport,
    SLDResult,
    check_saturation,
    classical_fisher,
    cramer_rao_bound,
    lambda_spectrum,
    quantum_fisher,
    sld_from_spectrum,
    sld_from_state,
)
from .montecarlo import (
    EstimationResult,
    MeasurementModel,
    ShotCounts,
    log_likelihood,
    mle_estimate,
    sample_readout,
    scaling_experiment,
    uncertainty_run,
)
from .operators import (
    HermitianEigen,
    MAX_QUBITS,
    anticommutator,
    commutator,
    hermitian_eigen,
    pauli_dense,
    pauli_expand,
    pauli_labels,
    pauli_matrix,
    pauli_terms_dense,
    unitary_evolution,
)
from .solver import (
    CoefficientSystem,
    ParityReport,
    SearchConfig,
    SearchResult,
    Solution,
    closed_form_solution,
    evaluate_two_qubit_system,
    dense_two_qubit_residuals,
    k_values_from_inv_lambdas,
    search_optimal_state,
    sol1_residual,
    solve_lambdas_given_state,
    two_qubit_system,
    verify_parity_obstruction,
)
from .states import (
    BlochCoefficients,
    DensityMatrix,
    cat_state,
    density_matrix,
    from_bloch,
    optimal_single_qubit,
    pure_state,
    random_mixed_state,
    random_pure_state,
    tensor_power,
    two_qubit_entangling_candidate,
)
from .verify import CheckResult, run_golden_suite

__all__ = [name for name in dir() if not name.startswith("_")]
