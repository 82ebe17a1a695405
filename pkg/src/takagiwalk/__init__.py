"""Exact Takagi-van der Waerden machinery and short-memory walks.

The package has three layers:

* exact kernels: base-r grid points (:mod:`takagiwalk.radix`), the series
  summands, increments, and their certified decomposition
  (:mod:`takagiwalk.takagi`), weight families (:mod:`takagiwalk.sequences`),
  and the differentiability trichotomy (:mod:`takagiwalk.classify`);
* walk laws and simulation (:mod:`takagiwalk.elephant`): the +-1 chain that
  repeats its previous step with probability p, its closed-form moments and
  spectral density, and counter-seeded vectorized path sampling;
* reproducible experiments (:mod:`takagiwalk.experiments`) and the
  ``takagiwalk`` command line (:mod:`takagiwalk.cli`).
"""

from .version import __version__

from .radix import (DEFAULT_DEPTH, DepthExhaustedError, DigitDepthResult,
                    RadixPoint, digit_depth_profile, digit_match_depth,
                    dist_to_int, hat_digit_match_depth, make_point,
                    sample_point, sample_points, scale_index)
from .sequences import (ConstantSequence, ExplicitSequence,
                        GeometricSequence, PowerSequence, StepSequence,
                        step_sequence)
from .takagi import (DerivativeWalkState, Enclosure, IncrementDecomposition,
                     SeriesTruncation, derivative_walk, eval_f,
                     eval_f_weighted, functional_eq_residual,
                     increment_decomposition, is_linear_on, psi, psi_plus,
                     total_increment)
from .elephant import (Localization, MemoryParameter, WalkPath, bridge_sums,
                       correlation, correlation_by_quadrature,
                       exact_second_moment, final_positions,
                       localization_class, memory_param_of_base,
                       running_max_statistic, simulate, spectral_density,
                       transition_power, weighted_simulate)
from .experiments import (BoundCheck, EmpiricalDistribution,
                          ExperimentReport, gaussian_samples,
                          k0_tail_experiment, ks_distance, lil_tracker,
                          localization_experiment, normal_cdf,
                          takagi_clt_experiment, walk_clt_experiment)
from .classify import (DiffLabel, DifferentiabilityClass, SeriesProbe,
                       classify_sequence, derivative_series_probe,
                       difference_quotient_probe)

__all__ = [name for name in dir() if not name.startswith("_")]
