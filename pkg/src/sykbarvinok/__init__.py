"""
Deterministic thermal expectations for the Sachdev-Ye-Kitaev model.

The package provides exact Majorana-string algebra, seeded SYK instances,
moment and cumulant sequences, a Taylor-interpolation estimator for local
thermal expectations, a dense Jordan-Wigner oracle, Wick-pairing disorder
averages and complex-temperature zero scans.
"""

__version__ = "0.1.0"

from .errors import (
    BetaOutOfRange,
    BudgetExceeded,
    DomainError,
    EpsilonOutOfRange,
    IndexOutOfRange,
    InvalidLocality,
    InvalidParity,
    NumericalContamination,
    ResultTooLarge,
    StatisticsTooFew,
    SykError,
    TooLargeForDense,
)
from .majorana import (
    MajoranaTerm,
    SparseOperator,
    adjoint,
    make_string,
    normalized_trace,
    op_multiply,
    term_product,
)
from .model import (
    Observable,
    SykInstance,
    build_hamiltonian,
    coupling_variance,
    dump_instance,
    dump_observable,
    load_instance,
    load_observable,
    observable_stats,
    parse_observable,
    sample_instance,
)
from .moments import MomentSequence, power_trace_sequence, read_moments_csv, write_moments_csv
from .estimator import (
    CumulantSequence,
    DuhamelCheck,
    EstimateReport,
    EstimatorParams,
    constant_C,
    cumulants_to_moments,
    duhamel_second_derivative_check,
    estimate_expectation,
    log_partition_taylor,
    moments_to_cumulants,
    select_parameters,
)
from .oracle import (
    gibbs_expectation,
    gibbs_state,
    log_partition_function,
    partition_function,
    spectral_norm,
    spectrum,
    string_expectations,
    to_dense,
)
from .disorder import (
    WickConfiguration,
    annealed_moments,
    annealed_partition_series,
    annealed_trace_moment,
    concentration_ratio,
    connected_factorization_check,
    enumerate_pairings,
    intersection_graph,
    local_fluctuations,
    monte_carlo_trace_moment,
    monte_carlo_two_replica,
    random_configuration,
    two_replica_moment,
)
from .zeros import (
    GridSpec,
    RadiusSheet,
    ZeroScanReport,
    radius_sheet,
    scan_annealed_zeros,
    scan_hamiltonian_zeros,
    scan_instance_zeros,
    tree_function,
)
