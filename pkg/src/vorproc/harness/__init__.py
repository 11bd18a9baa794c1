from .edge import DEPTH_CLASSES, EdgeStudy, depth_class_rstar, edge_study
from .oracle import CHECKS, OracleReport, direct_anova_ss, lens_area, oracle
from .plan import PROCESSES, ExperimentPlan, derive_seed, rng_for
from .run import (
    Replicate,
    ResultRecord,
    aggregate,
    replicate_stats,
    run,
    simulate_pattern,
    sweep,
    write_outputs,
)
