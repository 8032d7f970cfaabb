"""Instability certificates for representations of SL(n).

Given a representation built from the standard one by duals, exterior and
symmetric powers and tensor products, and an unstable vector v (one whose
orbit closure reaches 0), this package finds the fastest shrinking geodesic
direction / optimal destabilizing one-parameter subgroup and synthesizes a
verifiable lower bound

    log ||rho(g) v|| >= sum_j alpha_j log ||rho_j(g) w_j|| + c

over the fundamental representations rho_j, with nonnegative rational
alpha_j, then validates it by sampling.
"""

from .cartan import (CartanVector, Cocharacter, SimpleSystem, Weight,
                     chi_decompose, chi_recombine, dominant_order,
                     form_inner, fundamental_weights)
from .errors import (CertificateError, DimensionError, InstabError,
                     ParseError, StableVectorError, TorusStableError,
                     ZeroVectorError)
from .instability import (CertifyOptions, DominanceCert, FlatShrinkData,
                          KempfData, MinNormCert, ShrinkGeodesicResult,
                          TorusKempfResult, Verdict, VerifyReport,
                          cartan_box_sample, cert_from_dict, cert_to_dict,
                          dominance_certificate, dumps_cert,
                          fastest_shrinking_geodesic, flat_shrink_data,
                          hull_contains, is_unstable, loads_cert,
                          min_norm_point, torus_kempf, verify_dominance,
                          LIKELY_STABLE, NUMERIC_UNSTABLE, TORUS_CERTIFIED)
from .reps import (Dual, RepSpec, Representation, Standard, Sym, Tensor,
                   Wedge, act, active_weights, basis_labels, build_rep,
                   highest_weight_vector, log_rep_norm, m_value, norm_sq,
                   parse_rep_spec, rep_matrix, rep_norm, weight_components)
from .symspace import (BusemannEstimate, GeodesicRay, ParabolicData,
                       busemann_formula, busemann_limit, cartan_decompose,
                       distance, exp_sym, geodesic, haar_so,
                       iwasawa_decompose, log_spd, midpoint, modular_delta,
                       parabolic_data, project, ray_from_cartan)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
