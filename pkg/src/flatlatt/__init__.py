"""Thurston-Veech surfaces, certified saddle-connection spectra and NSVT enumeration."""

from .catalog import builtin, check_shortest_connection, verify_bottom_of_spectrum
from .combinat import (CylinderDiagram, Permutation, SingularityProfile, canonicalize, cycles,
                       enumerate_diagrams, genus_and_tau, is_transitive, singularity_profile)
from .config import RunConfig
from .enumerate import compare_with_paper_bound, enumerate_candidates
from .numeric import (AlgebraicNumber, Interval, NonnegIntMatrix, Ordering, certified_compare,
                      perron)
from .surface_geom import (RectangleSurface, SaddleConnection, alpha_bounds, cylinder_data,
                           enumerate_saddle_connections, min_virtual_triangle, standardize)
from .tv_construct import TVData, build_surface, intersection_matrix, parabolic_generators

__version__ = "0.1.0"
