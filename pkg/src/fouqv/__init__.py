"""Simulation and quadratic-variation estimation for the fractional
Ornstein-Uhlenbeck process of the second kind."""

__version__ = "0.1.0"

from .core import (
    ConfigError,
    FouqvError,
    GridError,
    HurstParam,
    RegimeError,
    RegularityError,
    SeedSpec,
    TimeChangeOverflow,
    TimeGrid,
    VolatilityFn,
    grid_from_points,
    inverse_time_change,
    make_uniform_grid,
    time_change,
)
from .gaussian import (
    CovMatrix,
    GaussianPath,
    Method,
    Process,
    PSDError,
    build_cov_matrix,
    circulant_sqrt_eigenvalues,
    fbm_cov,
    increment_cov_matrix,
    kernel_k,
    kernel_r,
    rowsum_bound,
    rowsum_diagnostic,
    sample_cholesky,
    sample_fbm,
    sample_fbm_circulant,
    sample_y1,
    variogram,
    variogram_bruteforce,
    y1_variogram,
)
from .harness import (
    CLTConfig,
    ConsistencyConfig,
    ExperimentReport,
    VarianceConstantConfig,
    estimate_variance_constant,
    fbm_variance_benchmark,
    ks_distance,
    run_clt,
    run_consistency,
    run_variance_constant,
)
from .pathwise import (
    PathTag,
    ProcessPath,
    holder_seminorm,
    p_variation,
    solve_fou2,
    young_error_bound,
    young_integral,
)
from .qv import QVSeries, clt_statistic, iv_target, qv_estimator, scaled_qv, sup_error, v_n
