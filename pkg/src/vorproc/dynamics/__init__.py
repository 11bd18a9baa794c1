from .process import (
    DynamicsError,
    EvolutionLog,
    Observer,
    ProcessState,
    StepRecord,
    cull_distribution,
    evolve,
    from_points,
    init_uniform,
    sample_culls,
    step,
    write_step_stream,
)
from .selection import NAMED, SelectionSpec, selection_weight
