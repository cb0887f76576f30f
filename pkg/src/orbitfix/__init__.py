"""Exact-arithmetic lab for orbit-nonexpansive maps and constructive fixed points.

Finite metric spaces are handled exhaustively; the ``ℓ∞`` box model uses
closed-form ball algebra and interval enclosures. All scalars are
:class:`fractions.Fraction`.
"""

from .box_space import Box, BoxSpace, box_ball_hull, box_cov, box_delta, box_radius_from, chebyshev_center
from .engine import (Certificate, CommonFixedPoint, EpsilonFixedPoint, PreconditionError, Stall,
                     cov_F, invariant_descend, ns_shrink_step, pq_shrink_step, solve_fixed_point,
                     verify_certificate)
from .finite_space import (AdmissibleLattice, CapExceeded, FiniteSpace, MetricError,
                           TriangleViolation, ball, ball_hull, build_finite_space, cov, delta,
                           enumerate_admissible, radius_from)
from .generators import InstanceBundle, gen_box, gen_example32, gen_named
from .maps import (BoxMap, MapFamily, MapTable, Verdict, check_commuting, check_group,
                   check_interlaced, check_mean_nonexpansive, check_nonexpansive,
                   check_orbit_nonexpansive, classify_map, falsify_box_interlaced,
                   falsify_box_orbit_nonexpansive, orbit, var)
from .structures import (StructureReport, box_structure_report, check_metric_ns,
                         check_one_local_retract, check_pq_urns, check_urns, uns_constant)

__version__ = "0.1.0"
