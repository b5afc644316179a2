"""hmpx: entropy-rate noise expansions for hidden Markov processes.

Computes the Taylor expansion around zero noise of the entropy rate of a
Markov chain observed through a near-identity noisy channel, exploiting
the fact that the k-th expansion coefficient of the finite-system
conditional entropy stops changing once the system length reaches
ceil((k+3)/2).  Ships the exact enumeration engine, the jet arithmetic
it runs on, numerical verifiers for the underlying identities, and Monte
Carlo cross-checks.
"""

from .engine import (
    DEFAULT_BUDGET,
    block_entropy,
    conditional_entropy,
    enumerate_sequences,
    mixed_partial_F,
    multi_site_F,
    sequence_probability,
)
from .errors import (
    BudgetExceeded,
    ConfigMismatch,
    DegreeExceedsCap,
    EpsilonOutOfRange,
    HmpxError,
    HypothesisNotMet,
    NonPositiveConstantTerm,
    NonPositiveEntry,
    NonSquare,
    OrderMismatch,
    ProfileLengthMismatch,
    RowSumViolation,
    SettlingViolation,
    SignViolation,
    UnreachableSequence,
)
from .estimation import (
    McEstimate,
    SampleRun,
    conditional_bounds,
    mc_entropy_rate,
    path_log_likelihood,
    sample_paths,
)
from .jets import MultiJet, UniJet
from .model import (
    HmpModel,
    NoiseGenerator,
    StochasticMatrix,
    emission_at,
    load_model,
    make_model,
    model_from_dict,
    random_model,
    random_noise,
    random_transition,
    validate_noise,
    validate_transition,
)
from .series import (
    LemmaReport,
    SeriesResult,
    SettlingTable,
    entropy_rate_series,
    evaluate_series,
    run_lemma_battery,
    settling_table,
    settling_threshold,
    verify_lemma_blocking,
    verify_lemma_no_hole,
    verify_lemma_zero_prepend,
)

__version__ = "0.1.0"
