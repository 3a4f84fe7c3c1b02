"""shorsim: classical simulator and analysis toolkit for the measurement
statistics of quantum order finding.

Exact output distributions over the measured register, deterministic
sampling, continued-fractions order recovery, factor extraction with
retry handling, and exhaustive success/failure experiments over small
semiprimes.
"""

from .distribution import (
    MAX_REGISTER_QUBITS,
    METHOD_ORACLE,
    METHOD_PER_K,
    METHOD_TWO_TERM,
    OrderInfo,
    OutputDistribution,
    PeakModel,
    ProblemInstance,
    capture_probability_d01,
    envelope,
    oracle_distribution,
    peak_deviation_prob,
    peaks,
    per_k_distribution,
    sample,
    sample_from,
    two_term_distribution,
)
from .errors import ContractError, DomainError, NoOrderError, ResourceError
from .experiments import (
    CaptureReport,
    CensusAggregate,
    FailureCensus,
    NeighborProbe,
    NeighborReport,
    ValuationModelResult,
    capture_rate_empirical,
    census_aggregate,
    census_sweep,
    failure_census,
    figure1_data,
    neighbor_state_check,
    semiprimes_below,
    valuation_model_mc,
)
from .number_theory import (
    ContinuedFractionExpansion,
    best_convergent_bounded,
    continued_fraction,
    gcd,
    lcm,
    mod_pow,
    multiplicative_order,
    order_from_multiple,
)
from .pipeline import (
    Classification,
    GuaranteeReport,
    RecoveryResult,
    RetryEvent,
    RetryPolicy,
    RunOutcome,
    extract_factors,
    order_recovery_guarantee,
    precheck,
    recover_order,
    run_once,
    run_with_retries,
    semiprime_factors,
)
from .rng import SplitMix64

__version__ = "0.1.0"
