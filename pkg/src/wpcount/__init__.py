"""Point counts of bounded height for morphisms of weighted projective lines over Q."""

__version__ = "0.1.0"

from .arith import FactoredRational, moebius, valuation, zeta_q
from .asymptotics import AsymptoticPrediction, leading_constant
from .enumeration import count_by_discrepancy, count_exact, convergence_report, moebius_crosscheck
from .local import GlobalAnalysis, LocalProfile, candidate_primes, discrepancy, global_analysis, local_profile
from .morphism import MorphismSpec, evaluate, load_fixture, parse_morphism, validate_no_common_zero
from .volume import bounding_box, volume_monte_carlo, volume_slice
from .weighted import (
    WeightedPoint,
    WeightVector,
    automorphism_count,
    canonical_orbit_rep,
    height,
    normalize_primitive,
    scale,
    scaling_ideal,
)
