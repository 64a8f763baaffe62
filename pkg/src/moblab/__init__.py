"""moblab: a desk-scale laboratory for multiobjective bilevel optimization
via value-function reformulations.

Subpackages: cones (ordering cones), mo_core (finite multiobjective kernel),
parametric (problem data, grids, sampling), catalog (worked examples with
analytic oracles), mappings (efficiency/frontier samples, closedness
probes), scalarize (weighted sums and exact LP), varanal (exact polyhedral
variational analysis), bilevel (discrete solves), cli (entry point).
"""

__version__ = "0.1.0"

from .cones import OrderingCone
from .mo_core import ImageSet, domination_holds, nondominated, weakly_nondominated
from .parametric import (FeasibilityDescriptor, GridSpec, ParametricMOP,
                         feasible_sample, problem_from_spec)

__all__ = [
    "OrderingCone", "ImageSet", "nondominated", "weakly_nondominated",
    "domination_holds", "ParametricMOP", "FeasibilityDescriptor", "GridSpec",
    "feasible_sample", "problem_from_spec", "__version__",
]
