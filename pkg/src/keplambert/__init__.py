"""Planar Kepler problem toolkit.

Unifocal conics, elapsed time along arcs of every conic type (radial
orbits through collisions included), the Lambert boundary-value problem,
families of arcs sharing chord, radii sum and energy, action integrals,
and a numeric propagation oracle used to cross-check all of them.
"""
from .action import (action_report, bisector_tangent_check, jacobi_velocity_decomposition,
                     maupertuis_action, principal_action, verify_hamilton_dwdH)
from .affine_geometry import affine_focus_property_check, geometric_progression_check
from .conic import (ConicOrbit, KeplerianArc, RectilinearOrbit, StateVector, UnifocalConic,
                    Vec2, angular_momentum, eccentricity_vector, energy, orbit_from_state,
                    second_focus, semimajor_axis, unifocal_residual)
from .cycle import (AffineMap2D, LambertCycle, affine_map_o12, cycle_arc_at,
                    cycle_continuation, cycle_from_arc, cycle_invariant_report,
                    normalize_to_vertical, rectilinear_limit)
from .errors import (CollisionError, DegenerateError, InfeasibleError, KeplerError,
                     NonConvergenceError, NonperiodicError, ParabolicError,
                     RectilinearFamilyError, VerificationError)
from .geometry import (ArcClass, ChordConfig, Direction, Winding, classify_arc,
                       euler_parabolic_tof, frame_align, gauss_rescaled, h_min, solve_lambert,
                       solve_lambert_rectilinear)
from .kepler import (conic_arc, period, rectilinear_arc, rectilinear_position,
                     solve_kepler_elliptic, solve_kepler_hyperbolic, state_at, time_of_flight)
from .kernels import BACKEND
from .propagator import PropagationResult, propagate, sweep_area

__version__ = "0.1.0"
