"""Horofunction boundaries of Carnot groups with layered sup norms.

Exact BCH arithmetic on graded nilpotent Lie algebras, layered sup norms,
Pansu-derivative blow-ups at unit-sphere points, the Heisenberg catalog,
boundary dimensions of filiform groups and numerical oracles.
"""

from .algebra import (GradedLieAlgebra, GroupPoint, abelian, filiform, from_config, heisenberg,
                      preset)
from .blowup import BlowupFamily, PiecewiseLinearFn, assemble_principal, family_dimension, pl_equal
from .convexity import SymPolytope, cross_polytope, cube
from .norms import (LayeredSupNorm, PNorm, PolyhedralNorm, QuadraticNorm, euclidean, heisenberg_norm,
                    homogeneous_sup_norm, norm_from_config, sup_layer)

__all__ = [
    "GradedLieAlgebra", "GroupPoint", "abelian", "filiform", "from_config", "heisenberg", "preset",
    "BlowupFamily", "PiecewiseLinearFn", "assemble_principal", "family_dimension", "pl_equal",
    "SymPolytope", "cross_polytope", "cube",
    "LayeredSupNorm", "PNorm", "PolyhedralNorm", "QuadraticNorm", "euclidean", "heisenberg_norm",
    "homogeneous_sup_norm", "norm_from_config", "sup_layer",
]
