"""Radial numerics for the inverse-square Hardy operator."""

from .core import (
    HardyParams,
    DerivedExponents,
    TruncationLevel,
    Barrier,
    Cutoff,
    TestFunction,
    exponents,
    phi,
    gamma,
    s_k,
    sphere_area,
    barrier_value,
    supersolution_margin,
    is_supersolution,
    cutoff_value,
    poly_bump,
    annulus_plateau,
)
from .grid import (
    RadialMesh,
    RadialFunction,
    PowerWeight,
    build_mesh,
    power_weight,
    lebesgue_weight,
    gamma_weight,
    from_callable,
    scale_power,
    abs_power,
    integrate,
    differentiate,
    super_level_intervals,
    level_set_measure,
    level_set_data,
)
from .operator import (
    OperatorKind,
    DirichletProblem,
    SolveResult,
    conservative_weight,
    lstar_apply,
    radial_apply,
    assemble,
    solve_dual,
    solve_direct_regular,
    solve_dirac,
    dirac_oracle,
    weak_identity_defect,
)
from .green import (
    RadialMeasure,
    MeasureNorm,
    GreenMode0,
    measure_norm,
    green_mode0,
    sample_green,
    potential,
    angular_riesz_average,
)
from .norms import (
    NormReport,
    StampacchiaResult,
    DivergenceVerdict,
    lp_norm,
    w1p_norm,
    marcinkiewicz_norm,
    annulus_marcinkiewicz,
    embedding_check,
    stampacchia_k0,
    stampacchia_bound,
    minimal_hypothesis_constant,
    equality_profile,
    truncation_energy_check,
    truncated_w1p_scan,
    classify_divergence,
    gradient_annulus_rate,
    estimate_critical_exponent,
)
from .suites import SuiteConfig, SuiteReport, SUITES, run_suite

__version__ = "0.1.0"
