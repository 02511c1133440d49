"""Reduction of invariant symplectic connections on T*G to coadjoint orbits.

The phase space is the left-trivialized cotangent bundle G x g*.  The library
builds the canonical symplectic structure and momentum maps, constructs a
right-invariant symplectic connection by projecting the bi-invariant baseline,
performs the reduction at a momentum level with reductive stabilizer, and
cross-validates the reduced connection and its curvature against independent
oracles.
"""

from .errors import (AssumptionTwoFailure, ConfigError, DegeneratePairing, NoRealization,
                     NonReductiveStabilizer, NotTangent, PointOffConstraint, RankLoss,
                     ReductionError, SingularOmega, SingularProjection, ZeroDimensionalBase)
from .liealg import (GroupElement, LieAlgebra, abelian, adjoint_matrix, algebra_from_json,
                     bracket, coad_star, coadjoint_matrix, compose, group_exp, heis3,
                     identity_element, named_algebra, reductive_complement, se2, sl2r,
                     so3, stabilizer_algebra, su2)
from .phasespace import (ConstraintSplit, PhasePoint, TrivTangent, constraint_split,
                         fundamental_field, liouville_form, momentum_map, omega_gram,
                         regularity_report, symplectic_form)
from .connections import (FrameConnection, QuadratureRule, average_connection,
                          baseline_connection, baseline_nabla_omega, connection_to_json,
                          finite_cyclic_rule, nabla_omega, nabla_omega_defect,
                          perturbed_connection, pullback_connection, symplectize, torsion,
                          torsion_defect, torus_rule)
from .orbits import (OrbitChart, OrbitTangentFrame, kks_form, orbit_chart,
                     orbit_tangent_frame, tangent_representative)
from .reduction import (KKS_MATCH_SIGN, AutoparallelReport, ReductionContext, SigmaGeometry,
                        autoparallel_check, build_context, coordinate_fields, default_chart,
                        horizontal_lift, isotropic_correction, isotropic_correction_gram,
                        kks_residual, reduced_covderiv, reduced_covderiv_gram_oracle,
                        reduced_form, sigma_covderiv, totally_geodesic_defect)
from .curvature import (CurvatureSample, convergence_factor, curvature_fd_oracle,
                        curvature_samples, curvature_symmetry_report,
                        reduced_curvature_formula)
from .pipeline import CaseConfig, run_pipeline, verify_suite

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
