"""Dimensions of invariant sets of diagonal torus endomorphisms.

Digit subshifts (full shifts or subshifts of finite type) are mapped to the
torus by a base-``diag(m)`` expansion. The package computes box and Hausdorff
dimensions, maximal entropy and full-dimension measures, and decides when the
two dimensions coincide.
"""

__version__ = "0.1.0"

from .errors import SpongeDimError
from .lattice import ExpansionSpec, LogRatio, build_expansion
from .symbolic import SoficAutomaton, SubshiftSpec, count_words, factor_automaton, topological_entropy
from .measures import (
    HiddenFactor,
    Interval,
    ShiftMeasure,
    full_dim_marginal,
    ly_dimension,
    maximal_entropy_measure,
    pushforward,
)
from .dimensions import (
    DimensionReport,
    GaugeFunction,
    box_dimension,
    coincidence_report,
    delta_divergence,
    fiber_profile,
    hausdorff_dimension_sponge,
    infinite_hausdorff_classifier,
    mme_equals_full_dim,
    peres_condition_lhs,
    peres_gauge,
    sum_delta_residual,
    weighted_pressure,
)
from .cubes import (
    ApproxCube,
    approximate_cube,
    count_cubes,
    cube_measure,
    density_diagnostic,
    empirical_box_dimension,
    represent,
)

__all__ = [
    "SpongeDimError", "ExpansionSpec", "LogRatio", "build_expansion",
    "SoficAutomaton", "SubshiftSpec", "count_words", "factor_automaton", "topological_entropy",
    "HiddenFactor", "Interval", "ShiftMeasure", "full_dim_marginal", "ly_dimension",
    "maximal_entropy_measure", "pushforward",
    "DimensionReport", "GaugeFunction", "box_dimension", "coincidence_report", "delta_divergence",
    "fiber_profile", "hausdorff_dimension_sponge", "infinite_hausdorff_classifier",
    "mme_equals_full_dim", "peres_condition_lhs", "peres_gauge", "sum_delta_residual", "weighted_pressure",
    "ApproxCube", "approximate_cube", "count_cubes", "cube_measure", "density_diagnostic",
    "empirical_box_dimension", "represent",
]
