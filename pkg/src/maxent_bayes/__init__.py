"""Constrained maximum-entropy inference over finite alphabets.

Library layout:

* ``measures``     finite distributions, empirical measures, losses, Bayes decisions
* ``tilting``      exponential tilts, I-projection, general-divergence projections
* ``ldp``          exact type-class tables, decay-rate estimates, conditioning
* ``meta``         distributions of expected-loss values and MAP model search
* ``correlation``  Gaussian-pair conditional-loss expansion and envelope checks
* ``cli``          the ``maxent-bayes`` command-line harness
"""

__version__ = "0.1.0"

from .measures import (
    Alphabet,
    BayesDecision,
    EmpiricalMeasure,
    FiniteDistribution,
    LossMatrix,
    bayes_classifier,
    empirical_from_samples,
    expected_loss,
    kl_divergence,
    shannon_entropy,
    total_variation,
)
from .tilting import (
    ConstraintSpec,
    DivergenceSpec,
    TiltedDistribution,
    divergence_projection,
    i_projection,
    necessity_gap,
    solve_tilt,
    stationarity_residual,
)
from .ldp import (
    ConditioningResult,
    RateEstimate,
    RatePoint,
    SeededSampler,
    TypeClassTable,
    contract_rate,
    enumerate_types,
    error_rate_function,
    gibbs_conditioning,
    sanov_exact,
    sanov_monte_carlo,
)
from .meta import (
    ErrorDistribution,
    MapModelResult,
    MetaConstraint,
    error_distribution_exact,
    maxent_error_fit,
    map_model,
    misfit_weight,
    run_meta_pipeline,
    simplex_grid,
)
from .correlation import (
    GaussianPairModel,
    LossCurve,
    LossFunction,
    MomentEnvelopeReport,
    conditional_loss_expansion,
    loss_correlation_curve,
    loss_function,
    moment_envelope_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
