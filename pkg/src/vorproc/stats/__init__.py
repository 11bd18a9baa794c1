from .anova import AnovaTable, edge_effect_anova
from .curves import (
    J_CAP,
    CurveData,
    average_curves,
    default_r_grid,
    empty_space_F,
    j_curve,
    j_estimate,
    nn_distance_G,
    nn_distances,
)
from .gamma import GammaFitError, digamma, gamma_shape_mle, trigamma
from .redundancy import (
    Epmf,
    depth_filter,
    included_ids,
    nn_epmf,
    pool_epmfs,
    redundancy_of,
    thiel_redundancy,
)
from .regression import RegressionFit, smooth_ln_j, weighted_poly_regression
