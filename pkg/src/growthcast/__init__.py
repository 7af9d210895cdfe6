"""Growth-rate analysis and trajectory forecasting.

Compute empirical growth rates of a time series, fit one of nine
linearizable rate-law families, solve the fitted law in closed form,
and report the trajectory's critical features (maximum, asymptote, or
finite-time singularity).
"""

from .diagnostics import (
    IdentificationReport,
    StabilityFlag,
    StabilityStatus,
    identify,
    stability_flag,
)
from .errors import (
    CollapseError,
    ConfigError,
    DegenerateFactorError,
    DegenerateFitError,
    DomainError,
    EmptyLinearizationError,
    FitWarning,
    GrowthcastError,
    InputError,
    NumericError,
    ParseError,
    RangeRefusalError,
    SingularIntegrandError,
    SingularityError,
    ValidationError,
)
from .fitting import (
    FitReport,
    LineFit,
    LinearizationKind,
    PolyFit,
    fit_line,
    fit_polynomial,
    fit_rate_model,
    fit_reciprocal_series,
    linearize,
    linearize_series,
    scan_shifted_aux,
)
from .forecast import (
    Projection,
    ScenarioReport,
    compare_scenarios,
    integrate_discrete,
    integrate_rate_function,
    project,
    project_normalized,
)
from .models import (
    FeatureKind,
    Features,
    Model,
    ModelKind,
    Params,
    features,
    integrate_rational,
    log_trajectory_at,
    normalize,
    rate_at,
    trajectory_at,
)
from .rates import (
    RateMethod,
    RateSeries,
    SmoothingConfig,
    direct_rates,
    rate_of_transform,
    refined_rates,
)
from .timeseries import TimeSeries, TransformKind, load_series, transform_series

__version__ = "0.1.0"
