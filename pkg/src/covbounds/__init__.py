"""Finite-sample confidence bounds for covariance, eigendecomposition and precision estimates."""
from .errors import (BoundVacuousError, CovBoundsError, DomainError, GenerationError,
                     IngestionError)
from .moments import MomentTable, SampleMatrix, compute_moments, moment_requirements
from .ustat import (CaseAssignment, CovEstimate, classify_case, cov_of_cov,
                    cov_of_cov_from_moments, estimate_covariance, zeta1)
from .interval import Interval, IntervalMatrix, sum_of_products
from .eigenbounds import (EigenBounds, PerturbationBound, eigen_bounds, eigenvalue_intervals,
                          eigenvector_sq_bounds, epsilon_bound, inverse_eigenvalue_interval,
                          minor_spectra, signed_bounds, tighten_orthonormal)
from .precision import (PrecisionReport, precision_intervals_eigen, precision_l2_threshold,
                        precision_point, precision_report)
from .stattest import (PairwiseTests, TestResult, fisher_z_test, partial_correlation,
                       test_all_pairs, test_entry)
from .synth import SyntheticSpec, random_precision, sample_gaussian, sample_laplace
from .dataio import ingest_csv, whiten

__version__ = "0.1.0"
