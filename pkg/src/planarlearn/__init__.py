"""Learning planar and outer-planar Ising models with exact inference.

Pairwise moments in, planar Ising model out: exact zero-field inference
through the Kac-Ward determinant, Newton maximum-likelihood fitting on a
fixed graph, and greedy planarity-preserving edge selection, with a
brute-force enumeration oracle for small-scale verification.
"""

from .errors import (
    AbsoluteContinuityError,
    DataError,
    EnumerationSizeError,
    FitError,
    InfeasibleMarginalError,
    LearnError,
    NonZeroFieldError,
    NotPlanarError,
    NumericalConsistencyError,
    PlanarLearnError,
)
from .fit import FitConfig, FitReport, clamp_targets, fit_ml, objective
from .graph import (
    DirectedEdgeIndex,
    Graph,
    PlanarEmbedding,
    faces,
    is_planar,
    planar_candidates,
    straight_line_embed,
    turning_angle,
)
from .kacward import (
    THETA_CAP,
    IsingModel,
    KacWardSystem,
    build_system,
    edge_marginal,
    hessian,
    log_partition,
    moments,
)
from .learn import (
    LearnConfig,
    LearnStep,
    LearnTrace,
    MomentSet,
    candidate_moments,
    contract_model,
    extend_model,
    extend_moments,
    greedy_select,
    outer_planar_learn,
    pairwise_kl,
)
from .oracle import (
    MAX_ENUM_VARS,
    StateDistribution,
    entropy,
    enum_distribution,
    enum_divergence,
    enum_log_partition,
    enum_moments,
    log_likelihood,
    pair_marginal,
)
from .sample import (
    GRID_RECOVERY_SEEDS,
    OUTER_RECOVERY_SEEDS,
    SamplerConfig,
    empirical_moments,
    gibbs_sample,
    grid_graph,
    random_grid_model,
    random_outer_planar_model,
)

__version__ = "0.1.0"
