"""lowsnr: moment tensors, EM, and likelihood landscapes of low-SNR Gaussian mixtures."""

from . import exceptions
from ._kernels import backend_name
from .core import (
    DiscreteMixture,
    NoiseScale,
    SymTensor,
    max_support_distance,
    moment_tensor,
    normalize,
    snr,
    tensor_inner,
)
from .cumulants import (
    CumulantTable,
    Partition,
    cumulant_coefficients,
    cumulant_from_moments,
    partitions_with_max_part,
)
from .em import (
    EMConfig,
    EMState,
    EMTrajectory,
    em_step,
    gradient_em_step,
    run_em,
    t1_one_step_scan,
    weight_expectation,
)
from .groups import (
    FiniteGroupAction,
    check_haar_identity,
    cyclic_group,
    orbit_mixture,
    planar_rotation_group,
)
from .landscape1d import (
    CriticalPoint1D,
    PowerSumSystem,
    classify_by_multiplicity,
    find_critical_point,
    power_sum,
    restricted_hessian_classify,
)
from .likelihood import (
    EmpiricalEvaluator,
    ExpansionReport,
    LikelihoodEvaluator,
    MonteCarlo,
    Quadrature,
    expansion_scan,
    grad_population_loglik,
    population_loglik,
    sample_loglik,
)
from .moment_match import (
    MomentObjective,
    StageResult,
    objective_value_and_grad,
    stagewise_solve,
    two_mixture_coordinates,
    variety_residual,
)

__version__ = "0.1.0"
