"""Potential-theoretic Neumann solver for the Kohn-Laplacian on the upper
half-space of the Heisenberg group.

Layers: group calculus (group), Gauss hypergeometric evaluation (hyp2f1),
closed-form kernels (kernels), boundary/volume quadrature (quadrature),
the Nystrom integral-equation solver (solver), the certification suite
(verification), an sklearn-style wrapper (estimator), and a CLI (cli).
"""

from .group import (HeisenbergPoint, ScalarField, StencilConfig,
                    apply_vector_field, circular_average, dilate, gauge_norm,
                    group_inverse, group_mul, horizontal_gradient,
                    kohn_laplacian, normal_derivative_boundary)
from .hyp2f1 import Hyp2F1Request, hyp2f1, hyp2f1_family, hyp2f1_many
from .kernels import (KernelContext, dperp_gbar, dperp_neumann_function,
                      dperp_psi, fundamental_solution, gauge_distance, gbar,
                      neumann_function, psi, reflect)
from .quadrature import (BoundaryQuadratureRule, VolumeQuadratureRule,
                         build_boundary_rule, build_volume_rule,
                         double_layer_subtracted, integrate_boundary,
                         integrate_volume, single_layer)
from .solver import (CircularityError, CompatibilityError, DensityVector,
                     OperatorMatrix, SolveReport, assemble,
                     compatibility_check, eval_solution,
                     solve_inhomogeneous, solve_interior_neumann)
from .verification import CheckResult, calibrate, run_all
from .estimator import NeumannSolver
from .fields import FIELD_NAMES, make_field

__version__ = "0.1.0"
