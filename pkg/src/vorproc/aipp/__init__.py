from .sampler import (
    DEFAULT_BURNIN,
    AippParams,
    AippState,
    ChainDiagnostics,
    TuningError,
    bd_mh_step,
    coverage_area,
    initial_beta,
    initial_state,
    log_density_unnormalised,
    papangelou,
    run,
    sample,
    tune_beta,
)
