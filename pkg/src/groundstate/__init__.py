"""Perron-Frobenius analysis of Schrodinger semigroups on finite state spaces."""

from .model import (AbsoluteContinuityViolation, Density, MarkovModel, PositiveFunction,
                    ProbMeasure, is_irreducible, jordan_model, load_model, save_model,
                    two_state_model, validate)
from .semigroup import (Kernel, duhamel_solve, growth_constant, kernel, normalized_kernel,
                        sandwich_check)
from .spectral import DegenerateSpectrum, eigen_equilibrium, lambda0_growth, principal
from .variational import (dv_supremum, log_inequality_check, logpm_inequality_check, rate_I,
                          rate_IV)
from .entropy import entropy_density, entropy_dual
from .htransform import (check_ground_measure, check_ground_state, contraction_check, h_kernel,
                         verify_triple)
from .construct import (HypothesisViolated, construct_ground_measure, entropy_ledger,
                        flux_balance_check)

__version__ = "0.1.0"
