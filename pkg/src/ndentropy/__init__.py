"""Exact-arithmetic entropy computations for nonautonomous dynamical
systems given by sequences of piecewise-linear maps of [0,1] or the
circle, together with estimators for metric and topological entropy and
a harness that checks the standard identities and inequalities
(power rules, shift invariance, commutativity, Rokhlin inequality,
variational inequality) on exactly representable systems.
"""
from .sets import (CIRCLE, INTERVAL, IntervalUnion, SpaceMismatchError,
                   point_distance, space_diameter)
from .measures import RationalMeasure
from .partitions import (IntervalSetPartition, PartitionSequence,
                         conditional_entropy, equal_mod_null, is_finer, join,
                         join_all, partition_entropy, rokhlin_distance)
from .maps import (ComposedChain, DensityDiagnostic, PiecewiseLinearMap,
                   StepDensity, UnsupportedMapError, affine_map, compose,
                   compose_chain, constant_map, density_ratio_diagnostic,
                   doubling_map, glued_double_tent_map, identity_map,
                   mirror_map, polyline_map, pushforward_measure, tent_map,
                   times_k_mod1_map, transfer_density)
from .systems import (CertificateError, MeasureSequence, SemiconjugacySpec,
                      SystemSequence, build_system, power_system,
                      pullback_by_semiconjugacy, restrict_system, shift_system)
from .metric import (AxiomCheck, EntropyTrace, MisiurewiczCertificate,
                     MisiurewiczFailure, ResourceLimitError, bowen_join,
                     check_axiom_A, check_coarser, entropy_trace,
                     estimate_limsup, independent_refinement_sequence,
                     metric_entropy_estimate, misiurewicz_check,
                     refine_sequence, verify_prop32)
from .topological import (CoverSequence, IntervalCover, OrbitGrid,
                          SubcoverCount, bowen_distance, cover_entropy_estimate,
                          lebesgue_number, minimal_subcover_count,
                          refine_cover_sequence, separated_count,
                          spanning_count, topological_entropy_estimate)
from .verify import (TheoremReport, verify_commutativity,
                     verify_metric_power_rule, verify_pf_stabilization,
                     verify_restriction, verify_shift_invariance,
                     verify_variational_inequality)

__version__ = "0.1.0"
