"""Batch consistency testing from add/remove perturbations of the sample mean.

A new batch of k observations is compared with a reference window of n
observations through Y_{n+k} - Y_n, the shift its inclusion causes in the
sample mean. Under consistency its law is close to that of the shift caused
by removing k observations, up to a known k/n term.
"""
__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .alternative import (MinBatchResult, ShiftAlternative, h1_cdf, min_batch_size,
                          power)
from .consistency import TestConfig, TestReport, build_null, sequential_gate, test_batch
from .core import (Batch, MomentSummary, SampleWindow, delta_minus, delta_plus,
                   estimate_moments, perturbation_variance, standardized_statistic,
                   window_mean)
from .edgeworth import (AnalyticNull, RegimeDiagnostic, edgeworth_cdf, gaussian_exact_cdf,
                        gaussian_remainder_bound, leading_difference, regime_check,
                        std_normal_cdf, std_normal_pdf, sup_difference)
from .errors import (ConfigError, DegenerateScaleError, DeltaTestError,
                     InvalidAlternativeError, InvalidKError, NoSolutionError, ParseError)
from .generators import (CategoricalModel, DirichletRegularization, GeneratorSpec,
                         dirichlet_marginal_moments, sample_categorical_loglik,
                         sample_dirichlet_loglik, standard_generator)
from .resample import (EmpiricalNull, corrected_cdf, empirical_quantile,
                       subsample_deltas)
