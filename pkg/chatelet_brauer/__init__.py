"""
chatelet-brauer — Brauer groups and local invariants of affine Châtelet surfaces.

Public API:
    RunConfig                — Environment-driven run configuration
    SurfaceSpec              — The surface x² − a·y² = c·P(t)
    BrauerClass              — A unit triple representing a class in Br U
    LocalPoint               — A point of X(Z_p)
    InvariantRecord          — One evaluated local invariant with provenance
    SweepReport              — Invariants at many points and the surjectivity verdict
    GroupPresentation        — Finite groups by multiplication table
    GIntModule               — Z-lattices with a group action
    cohomology_eff           — H^i through the efficient resolution of D_n
    cohomology_std           — H^i through the bar resolution
    NumberField              — Multivariate towers over Q
    splitting_field_for      — Splitting field of a surface with its Galois group
    quartic_galois_case      — Galois case of an irreducible quartic
    brauer_quotient          — Br X / Br_0 X
    explicit_generator       — Unit triple for a generator
    verify_class_order       — Order of a triple as a cocycle
    family_spec              — x² + y² = −(t⁴ − m)
    complete_at              — Completion of the splitting field at p
    search_points            — Points of X(Z_p) with small x, y
    relative_invariant       — inv(P) − inv(base) at one point
    sweep                    — Relative invariants over many points
    ChateletError            — Base exception
    UsageError               — Malformed input
    UnsupportedFamilyError   — Surface or place outside the supported families
    PrecisionError           — A result did not survive the guard digits
"""

__version__ = "0.1.0"

from .chatelet import brauer_quotient, explicit_generator, family_spec, verify_class_order
from .config import RunConfig
from .errors import (
    BoundaryPointError,
    ChateletError,
    CocycleConditionError,
    PrecisionError,
    UnsupportedFamilyError,
    UsageError,
)
from .gcoh import GIntModule, GroupPresentation, cohomology_eff, cohomology_std
from .localinv import relative_invariant, sweep
from .models import BrauerClass, InvariantRecord, LocalPoint, SurfaceSpec, SweepReport
from .numfield import NumberField, quartic_galois_case, splitting_field_for
from .padic import complete_at, search_points

__all__ = [
    "__version__",
    "RunConfig",
    "SurfaceSpec",
    "BrauerClass",
    "LocalPoint",
    "InvariantRecord",
    "SweepReport",
    "GroupPresentation",
    "GIntModule",
    "cohomology_eff",
    "cohomology_std",
    "NumberField",
    "splitting_field_for",
    "quartic_galois_case",
    "brauer_quotient",
    "explicit_generator",
    "verify_class_order",
    "family_spec",
    "complete_at",
    "search_points",
    "relative_invariant",
    "sweep",
    "ChateletError",
    "UsageError",
    "UnsupportedFamilyError",
    "CocycleConditionError",
    "BoundaryPointError",
    "PrecisionError",
]
