"""Game-based indistinguishability experiments (CPA, CCA1, CCA2, and
CCA2 with a timing channel) over pluggable public-key cryptosystems with
deterministic cost accounting, plus the worst-case fixed-time defense.
"""

from .adversaries import (
    AdversaryFactory,
    adversary_by_id,
    early_abort_probe_adversary,
    gm_malleability_adversary,
    random_guess_adversary,
    timing_distinguisher_adversary,
)
from .errors import (
    BudgetOverflowError,
    ConfigError,
    DomainError,
    ForbiddenQueryError,
    GameFault,
    InvalidChallengeError,
    PairingError,
    PolicyViolationError,
    SearchExhaustedError,
)
from .games import (
    AdvantageEstimate,
    ExperimentKind,
    OraclePolicy,
    Transcript,
    estimate_advantage,
    negligible_check,
    policy_for,
    run_experiment,
    run_trial,
)
from .numtheory import (
    KERNEL_BACKEND,
    CostLedger,
    gen_prime,
    is_probable_prime,
    jacobi,
    mod_mul,
    mod_pow_ladder,
    mod_pow_leaky,
)
from .schemes import (
    REJECT,
    CsScheme,
    GmScheme,
    KeyPair,
    LeakProfile,
    Scheme,
    leaky_wrap,
)
from .timing import (
    DelayModel,
    FixedTimeConfig,
    TimingView,
    calibrate_worst_case,
    network_delay,
    wrap_fixed_time,
)

__version__ = "0.1.0"
