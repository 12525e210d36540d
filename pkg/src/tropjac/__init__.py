"""tropjac: exact combinatorics of piecewise-linear divisors on dual graphs.

Tropical graphs, minimal base monoids via Smith normal form, finite
enumeration of slope assignments with a fixed multidegree, alignment
subdivisions and rubber-expansion data, all in exact integer/rational
arithmetic.
"""

__version__ = "0.1.0"

from .divisor import (
    HarmonicSolution,
    Multidegree,
    PLDivisor,
    harmonic_solve,
    make_divisor,
    multidegree,
    residuals,
    target_multidegree,
    tree_twist,
)
from .enumeration import (
    SlopeAssignment,
    brute_force_slopes,
    certified_bound,
    enumerate_slopes,
)
from .errors import TropJacError
from .graph import (
    Orientation,
    TropicalGraph,
    acyclic_orientations,
    enumerate_stable_graphs,
    validate,
    with_leg_weights,
)
from .lattice import (
    LatticeQuotient,
    MonoidHom,
    QElt,
    is_relatively_valuative,
    quotient,
    smith_normal_form,
)
from .rubber import (
    Cell,
    ChainCurve,
    Division,
    RubberData,
    SubdivisionFan,
    chain_curve,
    division_of,
    is_aligned,
    obstruction_ranks,
    rub_subdivision,
    subdivide_curve,
)

__all__ = [
    "TropJacError",
    "TropicalGraph",
    "Orientation",
    "validate",
    "acyclic_orientations",
    "enumerate_stable_graphs",
    "with_leg_weights",
    "LatticeQuotient",
    "QElt",
    "MonoidHom",
    "smith_normal_form",
    "quotient",
    "is_relatively_valuative",
    "PLDivisor",
    "Multidegree",
    "HarmonicSolution",
    "make_divisor",
    "multidegree",
    "target_multidegree",
    "residuals",
    "tree_twist",
    "harmonic_solve",
    "SlopeAssignment",
    "enumerate_slopes",
    "brute_force_slopes",
    "certified_bound",
    "Cell",
    "SubdivisionFan",
    "Division",
    "ChainCurve",
    "RubberData",
    "is_aligned",
    "rub_subdivision",
    "division_of",
    "chain_curve",
    "subdivide_curve",
    "obstruction_ranks",
]
