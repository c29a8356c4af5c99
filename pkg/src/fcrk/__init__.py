"""Explicit functional continuous Runge-Kutta and Runge-Kutta-Nystrom
methods with last-stage reuse for retarded functional differential
equations, plus an exact-arithmetic order-condition verifier and a
convergence benchmark harness."""

from .bench import (
    ConvergenceRow,
    InsufficientDataError,
    SlopeEstimate,
    TableauFormatError,
    emit_csv,
    emit_solution_csv,
    estimate_order,
    parse_csv,
    parse_tableau,
    run_convergence,
    sample_error,
    serialize_tableau,
)
from .history import (
    DomainError,
    HistorySpec,
    OverlapDomainError,
    Segment,
    SolutionTrace,
    StageAccessor,
)
from .orderconds import (
    CouplingDefect,
    DefectPoly,
    OrderReport,
    UnsupportedOrderError,
    coupling_defects,
    distinct_abscissae,
    gamma_defects,
    verify_fcrkn_order,
    verify_fcrk_quadrature,
)
from .problems import (
    Rfde2Problem,
    RfdeProblem,
    get_problem,
    problem1,
    problem2,
    problem3,
    problem4,
    quadrature_problem,
)
from .ratpoly import RationalPoly, RationalPoly2
from .stepper import (
    IntegrationConfig,
    IntegrationError,
    StepStats,
    fcrk_step,
    fcrkn_step,
    integrate,
    integrate_fcrk,
    integrate_fcrkn,
)
from .tableau import (
    FcrknTableau,
    FcrkTableau,
    MethodId,
    builtin,
    validate_structure,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceRow",
    "CouplingDefect",
    "DefectPoly",
    "DomainError",
    "FcrkTableau",
    "FcrknTableau",
    "HistorySpec",
    "InsufficientDataError",
    "IntegrationConfig",
    "IntegrationError",
    "MethodId",
    "OrderReport",
    "OverlapDomainError",
    "RationalPoly",
    "RationalPoly2",
    "Rfde2Problem",
    "RfdeProblem",
    "Segment",
    "SlopeEstimate",
    "SolutionTrace",
    "StageAccessor",
    "StepStats",
    "TableauFormatError",
    "UnsupportedOrderError",
    "builtin",
    "coupling_defects",
    "distinct_abscissae",
    "emit_csv",
    "emit_solution_csv",
    "estimate_order",
    "fcrk_step",
    "fcrkn_step",
    "gamma_defects",
    "get_problem",
    "integrate",
    "integrate_fcrk",
    "integrate_fcrkn",
    "parse_csv",
    "parse_tableau",
    "problem1",
    "problem2",
    "problem3",
    "problem4",
    "quadrature_problem",
    "run_convergence",
    "sample_error",
    "serialize_tableau",
    "validate_structure",
    "verify_fcrk_quadrature",
    "verify_fcrkn_order",
]
