"""Monotone block coordinate descent for absolute value equations ``A x - |x| = b``."""
from .errors import (
    AveError,
    DegenerateBlock,
    DimensionMismatch,
    NonSymmetric,
    ParseError,
    TooLarge,
    ZeroRhs,
)
from .objective import eval_f, eval_grad, eval_res, evaluate
from .problem import (
    AveProblem,
    SpdCertificate,
    generate,
    make_example41,
    make_example43,
    make_random_spd,
    make_tridiag_example,
    read_problem,
    validate,
    write_problem,
)
from .solvers import (
    IterationRecord,
    SolveReport,
    SolverOptions,
    Status,
    solve,
    solve_bcda,
    solve_mgsm,
    verify_solution,
)

__version__ = "0.1.0"
