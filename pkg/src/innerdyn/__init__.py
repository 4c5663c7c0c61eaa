"""Numerical correspondences between invariant Fatou components of entire
maps and their inner-function models on the disc and half-plane."""

from .blaschke import (
    FiniteBlaschke,
    SineFamilyProduct,
    TruncatedInfiniteBlaschke,
    eval_finite,
    eval_sine_product,
    lambda_of_tau,
    solve_topfer_k,
    tau_of_lambda,
    uniform_circle_distance,
)
from .correspondence import (
    PairingReport,
    check_unisingular_form,
    verify_exp_pairing,
    verify_fatou_pairing,
    verify_parabolic_tan,
    verify_sine_pairing,
)
from .entire import (
    AlphaD,
    CstarLift,
    CstarMap,
    ExpLambda,
    FatouLambda,
    KoenigsChart,
    PowerExp,
    RhoD,
    SineLambda,
    ZExp,
    critical_points,
    exp_multiplier_map,
    koenigs_chart,
    rho_bifurcation_lambda0,
)
from .halfplane import (
    CotFamily,
    FixedPointRecord,
    TanFamily,
    boundary_curve_theta,
    classify_tan_family,
    denjoy_wolff_estimate,
    mu_from_ab,
    solve_ab_from_multiplier,
)
from .inner_factor import (
    AtomicInnerFunction,
    AtomicMeasure,
    eval_atomic_inner,
    eval_singular,
    frostman_transform,
)
from .numerics import (
    RootSolveConfig,
    disc_distance,
    halfplane_distance,
    newton_holomorphic,
    orbit,
    stable_cot,
    stable_tan,
)
from .raster import (
    ClassifyCriteria,
    Grid,
    GridSpec,
    classify_grid,
    count_tracts,
    count_unbounded_components,
)

__version__ = "0.1.0"
