"""spraylab: curvature quantities of sprays via exact Taylor-jet calculus."""

__version__ = "0.1.0"

from .jets import Jet, JetDomainError, eval_derivatives, lift_variable, partial
from .spray_core import (Box, PointTM, SprayChart, TensorValue,
                         berwald_connection, berwald_curvature, make_family,
                         nonlinear_connection, riemann_four_index,
                         riemann_two_index, sample_points)
from .curvature import (ChiValue, chi_definition, chi_from_t, chi_local,
                        chi_trace, classify, eta, ricci_scalar, ricci_tensor,
                        t_curvature, weyl)
from .projective import (DeformedSpray, VolumeForm, deform, douglas, eta_hat,
                         hat_riemann, projective_invariance_check,
                         projective_ricci, s_closed_residual, s_curvature,
                         weyl_hat)
from .finsler import (FinslerMetric, RandersData, cartan_torsion, chi_cartan,
                      fundamental_tensor, induced_spray, mean_cartan)
