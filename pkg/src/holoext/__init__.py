"""holoext: weight-sequence calculus for entire extension of smooth classes.

The package verifies, on concrete desk-scale data, that smooth functions
controlled by a factorially dominated weight sequence extend to entire
functions with matched growth, and that derivative recovery through
Cauchy integrals inverts the extension with explicit constants.
"""

from .analytic_bounds import Envelope, EnvelopeError, p_upper, q_upper
from .extension import (ExtensionResult, GrowthReport, TailError, adaptive_extend,
                        extend, growth_ratio, multinomial_sum, tail_bound)
from .models import (EntireModel, ModelPair, OracleDepthError, SmoothModel,
                     cosine_model, gaussian_derivative, gaussian_model,
                     make_model, polygauss_model)
from .phi_families import (PhiFamily, ShiftBound, check_separation,
                           check_superlinear, power_family, shift_bound)
from .restriction import (BoundValue, ChainConstants, InfOverR, PolydiscContour,
                          cauchy_derivative, cauchy_derivative_checked, cauchy_jet,
                          chain_bound_at_R, chain_constants, contour,
                          derivative_sup_bound, inf_over_R_bound, restriction_bound)
from .seminorms import (ContinuityReport, MembershipReport, RoundtripReport,
                        SeminormEstimate, backward_continuity_check,
                        forward_continuity_check, membership_estimate, p_estimate,
                        q_estimate, roundtrip)
from .sequences import (Alpha2Certificate, CheckReport, DualFitError, DualSequence,
                        SequenceSpec, WeightSequence, check_K_submultiplicative,
                        check_supermultiplicative, derive_dual, explicit_sequence,
                        from_spec, geometric_gevrey, gevrey, log_factorials,
                        validate_alpha1, validate_alpha2, validate_growth)
from .weight_function import (AssociatedWeight, LemmaGap, WeightValue, eval_w,
                              eval_w_grid, from_dual, legendre_recover, lemma_gap,
                              lemma_gap_grid, optimal_radius, trace_index)

__version__ = "0.1.0"
