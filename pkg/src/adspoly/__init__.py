"""Convex hyperideal polyhedra in anti-de Sitter space.

The submodules are layered: ``hs_kernel`` (projective model, Hilbert distance,
isometries), ``graphs`` (marked skeletons and flips), ``admissibility`` (angle
conditions), ``polyhedron`` (hulls, dihedral angles, induced metric),
``duality``, ``rigidity`` and ``realization``.  ``cli`` is the command-line
front end.
"""

from .admissibility import AngleAssignment, check_gamma_admissible, sample_admissible, sample_admissible_with_signs
from .duality import dual_polyhedron, truncate
from .errors import AdsPolyError, DomainError, NumericalError, RefusalError
from .graphs import MarkedGraph, Side, flip, flip_graph, validate_marked_graph
from .hs_kernel import ComplexDistance, Isometry, ProjectivePlane, ProjectivePoint, hilbert_distance, inner
from .polyhedron import (
    HyperidealPolyhedron,
    angle_map,
    build_polyhedron,
    dihedral_angle,
    induced_metric_complex,
    polyhedron_from_json,
    sample_polyhedron,
    vertex_angle_sum,
)
from .realization import SolveOptions, realize, realize_with_log
from .rigidity import rigidity_report

__version__ = "0.1.0"

__all__ = [
    "AdsPolyError",
    "AngleAssignment",
    "ComplexDistance",
    "DomainError",
    "HyperidealPolyhedron",
    "Isometry",
    "MarkedGraph",
    "NumericalError",
    "ProjectivePlane",
    "ProjectivePoint",
    "RefusalError",
    "Side",
    "SolveOptions",
    "angle_map",
    "build_polyhedron",
    "check_gamma_admissible",
    "dihedral_angle",
    "dual_polyhedron",
    "flip",
    "flip_graph",
    "hilbert_distance",
    "induced_metric_complex",
    "inner",
    "polyhedron_from_json",
    "realize",
    "realize_with_log",
    "rigidity_report",
    "sample_admissible",
    "sample_admissible_with_signs",
    "sample_polyhedron",
    "truncate",
    "validate_marked_graph",
    "vertex_angle_sum",
]
