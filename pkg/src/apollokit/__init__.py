"""Exact computations with Descartes configurations and Apollonian groups."""

from .arith import (find_rational_intertwiner, form_padic_invariant, padic_invariant_scalar,
                    rationally_equivalent, square_class_equal, super_rational_dimension)
from .configs import (DescartesConfig, permute, reverse_orientation, seed_integral_n2,
                      seed_polystrip, soddy_gossett_residual, validate)
from .ensembles import check_packing, curvature_spectrum, generate_orbit, s_integrality_report
from .errors import ApollokitError
from .exactq import Rational, RationalMatrix, congruence, determinant, inverse, mat_mul
from .forms import (QuadraticForm, conway_diagonalize, descartes_form, lorentz_form,
                    lorentz_intertwiner_n2, wilker_diagonal, wilker_form)
from .groups import (GenSymbol, Word, mass_certificate, reduce_word_n3, verify_relations,
                     word_to_matrix)
from .moebius import apply_moebius, isochronous_test, wilker_matrix
from .spheres import (Hyperplane, Sphere, acc_coords, classify_pair, dual_configuration,
                      orthogonal_sphere, separation, separation_acc, sphere_from_acc)

__version__ = "0.1.0"
