"""Mean-field Gibbs measures with multilinear interactions.

Subpackages by capability:

- :mod:`multigibbs.measures` -- atomic base measures and exponential tilts
- :mod:`multigibbs.kernels` -- motif graphs, step kernels, cut norms
- :mod:`multigibbs.meanfield` -- limiting free-energy solvers and verdicts
- :mod:`multigibbs.sampler` -- finite-n Glauber dynamics and exact oracles
- :mod:`multigibbs.empirics` -- empirical clouds, limit laws, distances
- :mod:`multigibbs.presets` -- seeded reproduction experiments
- :mod:`multigibbs.cli` -- the ``multigibbs`` command
"""

from .measures import (
    BaseMeasure,
    bernoulli,
    is_stochastically_nonnegative,
    ising_pm1,
    nonneg_tilt_of_symmetric,
    quadrature_measure,
    three_point,
)
from .kernels import (
    CouplingMatrix,
    MotifGraph,
    StepKernel,
    cut_distance,
    cut_norm_exact,
    cut_norm_heuristic,
    degree_profile,
    hom_functional,
    is_regular,
    kernel_preset,
    lr_norm,
    matrix_to_kernel,
    motif_preset,
    sym_eval,
    vartheta_profile,
    weak_cut_distance_small,
)
from .meanfield import (
    FieldProfile,
    MultistartSpec,
    SolveReport,
    critical_theta,
    profile_fixed_point,
    profile_objective,
    quadratic_case,
    replica_symmetry_verdict,
    scalar_fixed_points,
    scalar_maximizers,
    scalar_objective,
    solve_free_energy,
    uniqueness_field,
)
from .sampler import (
    ModelSpec,
    SamplerState,
    contrast,
    exact_glauber_stationarity,
    exact_small_n,
    glauber_sweep,
    hamiltonian,
    hamiltonian_stat,
    initial_state,
    local_field,
    local_fields,
    moment_diagnostics,
    permutation_invariance_check,
    sample_chain,
)
from .empirics import (
    EmpiricalMeasure2D,
    LimitLaw,
    bl_distance,
    build_limit_sets,
    distance_to_set,
    empirical_of_config,
    empirical_of_fields,
    lp_profile_distance,
    sample_limit,
)

__version__ = "0.1.0"
