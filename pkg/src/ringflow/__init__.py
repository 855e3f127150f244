"""ringflow: finite-volume simulation of multi-class non-local traffic flow
with per-class reaction delays."""

__version__ = "0.1.0"

from .diagnostics import (
    EntropyReport,
    empirical_time_lipschitz,
    entropy_kappa_set,
    entropy_residual,
    entropy_sweep,
    j_functional,
    l1_distance,
    l1_norm,
    total_variation,
)
from .discretization import (
    DiscreteKernel,
    Grid,
    TimeGrid,
    build_kernel_weights,
    cfl_bound,
    plan_time_grid,
)
from .harness import (
    SweepResult,
    delay_sweep,
    penetration_sweep,
    refinement_study,
    stability_experiment,
)
from .model import (
    Boundary,
    ClassSpec,
    ConstantKernel,
    Coupling,
    ExponentialSaturation,
    Greenshields,
    InitialData,
    LinearDecreasingKernel,
    ModelSpec,
    NoSaturation,
    Scenario,
    Triangular,
    validate_model,
)
from .profiles import (
    Constant,
    CosineBump,
    FromFunction,
    Gaussian,
    Samples,
    Scaled,
    SplitShare,
    Summed,
)
from .scenarios import (
    PRESETS,
    build_preset,
    preset_av_penetration,
    preset_delay_convergence,
    preset_invariant_domain,
    preset_overtaking,
    preset_perturbation,
)
from .solver import (
    HistoryRing,
    PreparedRun,
    SimState,
    StepRecord,
    Trajectory,
    convolved_velocity,
    hw_step,
    prepare,
    run,
)

__all__ = [name for name in dir() if not name.startswith("_")]
