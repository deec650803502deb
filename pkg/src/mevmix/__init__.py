"""Generalized logistic multivariate extreme value copulas.

Mixtures of max-stable copulas driven by positive stable variables: exact
evaluation, sampling, and orthant tail dependence coefficients.
"""

__version__ = "0.1.0"

from .copulas import M4, Comonotone, GumbelLogistic, Independence, MaxStableCopula
from .errors import (
    ConfigurationError,
    DomainError,
    MevMixError,
    ModelValidationError,
    ShapeError,
    SpecError,
    UnsupportedOperationError,
)
from .model import (
    MevMixModel,
    MixtureComponent,
    make_asymmetric_logistic,
    make_cuadras_auge,
    make_generalized_archimedean,
    make_geometric_mean,
    make_logistic,
    make_tawn_model,
    model_cdf,
    model_exponent,
    sample_model,
    validate_model,
)
from .specio import load_model, model_from_dict
from .stable import laplace_transform_check, sample_positive_stable
from .subsets import SubsetMask
from .taildep import (
    TailDepReport,
    bivariate_lambda,
    empirical_lambda,
    m4_bivariate_lambda,
    m4_singleton_numerator,
    orthant_lambda,
    orthant_lambda_logistic,
    orthant_mass,
)
