"""Variable smoothing solvers for f(x) + sum_i g_i(K_i x) with Lipschitz g_i."""

from . import kernels
from .kernels import BACKEND
from .linops import (LinearOperator, StackedOperator, conv2d, d1_rows, d2_cols, estimate_norm,
                     gaussian_kernel, identity, matrix_operator, stack)
from .moreau import (SmoothedTerm, composite_grad, envelope_dmu, envelope_grad, envelope_value,
                     smoothed_objective)
from .proxlib import ProxFunction, conj_prox, l1_norm, l2_dist, zero_function
from .schedules import ScheduleKind, ScheduleState, advance, init, nesterov_const_mu, svast, vast_default
from .solvers import (BernoulliGradient, CompositeProblem, DivergenceError, FullGradient, SolverResult,
                      Trace, run_pdhg, run_spdhg, run_svast, run_vast)
from .spaces import BlockVector, ParameterError, RngStream, Shape, ShapeError, dot, gaussian, lincomb, norm2

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "kernels",
    "LinearOperator", "StackedOperator", "conv2d", "d1_rows", "d2_cols", "estimate_norm",
    "gaussian_kernel", "identity", "matrix_operator", "stack",
    "SmoothedTerm", "composite_grad", "envelope_dmu", "envelope_grad", "envelope_value",
    "smoothed_objective",
    "ProxFunction", "conj_prox", "l1_norm", "l2_dist", "zero_function",
    "ScheduleKind", "ScheduleState", "advance", "init", "nesterov_const_mu", "svast", "vast_default",
    "BernoulliGradient", "CompositeProblem", "DivergenceError", "FullGradient", "SolverResult",
    "Trace", "run_pdhg", "run_spdhg", "run_svast", "run_vast",
    "BlockVector", "ParameterError", "RngStream", "Shape", "ShapeError", "dot", "gaussian",
    "lincomb", "norm2",
]
