"""Kirkwood-Dirac positive states of a pair of orthonormal bases.

The pair of bases is described by its unitary transition matrix
``U[i, j] = <a_i|b_j>``; operators are given by their matrix in the ``a`` basis.
"""

__version__ = "0.1.0"

from .bases import (SpinFrame, check_d3_genericity, check_phase_genericity, dft,
                    equivalence_normalize, find_equivalence, haar_random, perturb_columns,
                    sylvester_hadamard_mub, u_star, wigner_small_d)
from .core import (PositivityReport, TransitionMatrix, as_transition, classify,
                   kd_distribution, marginals, overlap_trace, projector, reconstruct,
                   support_counts)
from .exceptions import KDError, NumericalError, ValidationError
from .geometry import (beyond_pure_hull_certificate, enumerate_pure_kd_positive_d3, f_perp,
                       hull_membership, interior_membership, mub_support_law_check,
                       section_scan, two_support_candidates, x_interval, x_max_search,
                       y_plus_hexagon_check)
from .linalg import DEFAULT_TOL, TolerancePolicy
from .real_space import (assemble_im_q, conjecture_scan, is_minimal_polytope,
                         kd_real_dimension, verify_dft_kernel_structure,
                         verify_real_symmetric_structure)
