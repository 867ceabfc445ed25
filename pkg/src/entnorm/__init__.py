"""Norm-ratio entanglement measures and three-mode condensate dynamics."""

from .tensor_core import (
    CompositeStructure,
    NormMeta,
    OperatorMatrix,
    SchemaError,
    SchmidtForm,
    StateVector,
    hermitian_eigensystem,
    load_operator,
    load_state,
    operator_from_document,
    operator_to_document,
    partial_trace,
    save_operator,
    save_state,
    schmidt_decompose,
    state_from_document,
    state_to_document,
    tensor_product,
    validate_operator,
)
from .disentangled_norm import (
    NormResult,
    OptimizerOptions,
    ProductVector,
    brute_force_disentangled_norm,
    disentangled_norm,
    hilbert_norm,
)
from .entanglement_measure import (
    MeasureReport,
    ModePopulations,
    ProductFactorization,
    entanglement_measure,
    marginal,
    measure_bipartite_pure,
    measure_report,
    multimode_density,
    multimode_measure,
    normalized_marginal,
    product_counterpart,
    reduced_density_measure,
    reduced_von_neumann_entropy,
    report_document,
)

from .rk import (
    IntegrationError,
    IntegrationResult,
    StepControl,
    integrate_sampled,
)
from .bec_dynamics import (
    CSV_HEADER,
    DynState,
    IntegratorOptions,
    ModeParams,
    Trajectory,
    entanglement_series,
    init_from_amplitudes,
    integrate,
    rhs,
    rhs_raw,
    write_trajectory_csv,
)
from .verify import (
    SuiteResult,
    VerifyReport,
    run_property_suites,
)

__version__ = "0.1.0"
