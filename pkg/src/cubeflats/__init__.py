"""Combinatorial analysis of finite CAT(0) cube complexes.

The package covers four layers: median-graph operations on the 1-skeleton of
a cube complex (``complexes``), the dual cube complex of a finite wallspace
(``wallspaces``), classification of hyperplane orbits over a periodic flat
with the hull dichotomy and its push-off witnesses (``periodic``), and
integer-lattice commensurability obstructions to cocompact cubulation
(``lattices``).  ``cli`` exposes everything as a command-line tool.
"""

from .complexes import (CubeComplex, Halfspace, InvalidComplexError,
                        MedianAxiomError, NoCommonPoint, ProductFactor,
                        Thickening, isomorphic, product_complex)
from .lattices import (NonPrimitiveVectorError, ObstructionReport,
                       PresentationSyntaxError, Sublattice,
                       TubularPresentation, commensurable, hnf, intersect,
                       obstruction, parse_presentation, tubular_obstruction)
from .periodic import (Aligned, Crossing, CrossingInterval, DichotomyReport,
                       ExcessClassesWitness, NonCocompact, ParallelismClass,
                       PeriodicWallspace, ProductOfQuasilines,
                       PushoffAuditError, PushoffResult, QuasilineFailure,
                       SemiCrossing, SemiCrossingPresent, SemiCrossingWitness,
                       ValidationError, WindowError, WindowHull,
                       alignment_classes, classify_pair, dichotomy,
                       disjointness_index, pushoff, quasiline_certificate,
                       validate, window_hull)
from .wallspaces import (Wallspace, WallspaceError, canonical_orientation,
                         dual, dual_with_orientations, grid_wallspace)

__version__ = "0.1.0"
