from .analytic import (OmittedPair, BranchPath, MapSpec, LinearFunctional,
                       psi_eval, psi_prime, continue_psi, eval_map,
                       coefficient, coefficients, apply_functional,
                       perturbation_radius)
from .decomposition import (SignWord, DecompositionNode, ConvexDecomposition,
                            build_tree, g_eval, decompose,
                            verify_reconstruction, verify_disjointness,
                            verify_partition, fixed_point, verify_fixed_point,
                            rationalized_fixed_point,
                            branch_fixed_point_residual)
from .loewner import (DrivingFunction, LoewnerChain, SupportPointData,
                      TailDecomposition, ode_solve, explicit_koebe_chain,
                      variational_integral, theorem2_report, remainder_decay,
                      remark1_check)
from .polyext import (PolynomialCandidate, UnivalenceCertificate,
                      ExtremalResult, ExtremalSearch, is_univalent,
                      boundary_self_intersection, derivative_winding,
                      boundary_derivative_min, zero_simplicity_check,
                      retract_to_certified, maximize_functional)

from ._version import __version__

__all__ = ['OmittedPair', 'BranchPath', 'MapSpec', 'LinearFunctional',
           'psi_eval', 'psi_prime', 'continue_psi', 'eval_map',
           'coefficient', 'coefficients', 'apply_functional',
           'perturbation_radius', 'SignWord', 'DecompositionNode',
           'ConvexDecomposition', 'build_tree', 'g_eval', 'decompose',
           'verify_reconstruction', 'verify_disjointness',
           'verify_partition', 'fixed_point', 'verify_fixed_point',
           'rationalized_fixed_point', 'branch_fixed_point_residual',
           'DrivingFunction', 'LoewnerChain',
           'SupportPointData', 'TailDecomposition', 'ode_solve',
           'explicit_koebe_chain', 'variational_integral',
           'theorem2_report', 'remainder_decay', 'remark1_check',
           'PolynomialCandidate', 'UnivalenceCertificate', 'ExtremalResult',
           'ExtremalSearch', 'is_univalent', 'boundary_self_intersection',
           'derivative_winding', 'boundary_derivative_min',
           'zero_simplicity_check', 'retract_to_certified',
           'maximize_functional', '__version__']
