"""Warped-product gradient Ricci solitons over Euclidean space: closed forms,
residual verification, reduced ODE integration and translation-invariance
detection."""
from .closed_forms import (
    ExpTranslationParams,
    GaussianParams,
    OdeFamily,
    OdeFamilyParams,
    SolitonBundle,
    WarpedSolitonSpec,
    family_exp_translation,
    family_ode_expanding,
    family_ode_shrinking,
    family_ode_steady,
    gaussian_bundle,
    gaussian_potential,
    lift_profile,
    reduced_potential,
)
from .fields import GridSpec, NonFiniteError, Profile, ScalarField
from .invariance import (
    InvarianceFit,
    Verdict,
    detect_translation_invariance,
    proportionality_constants,
)
from .ode_reduction import (
    BACKEND,
    OdeParams,
    OdeState,
    OdeTrajectory,
    check_trajectory,
    integrate_m1,
    integrate_reduced,
    rhs_reduced,
)
from .soliton_core import (
    F_MIN,
    ResidualBlock,
    ResidualReport,
    SingularPointError,
    SolitonClass,
    classify,
    residual_direct,
    residual_system,
    solve_lambda_f,
    verify_on_grid,
)

__version__ = "0.1.0"
