"""Banded Toeplitz matrices with asymptotically real spectrum.

Symbols, root-modulus limiting sets, Jordan curves in ``b^{-1}(R)``, the
limiting eigenvalue measure, Hankel moments and the associated Jacobi
operator.
"""

from .symbol import (CriticalPoint, Symbol, SymbolError, TruncatedSymbol, compose_entire,
                     critical_points, derivative, evaluate, make_symbol, symbol_from_json,
                     symbol_to_json)
from .polyroots import RootError, RootsByModulus, defect, roots, roots_batch, roots_by_modulus
from .toeplitz import (EigenReport, NumericalError, RealityReport, ToeplitzSection, bilinear_form_curve,
                       eigenvalues, hessenberg_det_sequence, norm_bound, reality_check,
                       toeplitz_section, trace_power_mean)
from .curve import (ClassVerdict, CurveNotFound, JordanCurveSamples, NetPlot, compute_net,
                    curve_critical_partition, is_class_R, reflect_curve, trace_polar)
from .limitset import LimitingSetCloud, exceptional_points, limiting_set_scan, support_interval
from .moments import (HankelData, MomentSequence, MonteCarloEstimate, PositivityReport, hankel,
                      hankel_det_mc, hankel_positivity, moments)
from .measure import (DensitySamples, JacobiParameters, LimitingMeasure, MomentProblemError,
                      cauchy_transform, density_from_curve, density_from_m, distribution_from_curve,
                      jacobi_params, kolmogorov_distance, nevai_limits_check, orthogonality_check,
                      orthopoly_eval, weyl_m)
from .oracles import fixtures, get_fixture, oracle_example3, oracle_fourdiag, oracle_tridiag

__version__ = "0.1.0"
