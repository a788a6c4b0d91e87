"""Hardy Z-functions of class-group L-functions of large conductor near the real axis."""

from .engine import Completion, Evaluator, TaylorGrid, build_grid, direct_eval, precompute_sums, z_eval
from .errors import (ConvergenceError, InputError, InvalidFormError, LFunctionError, NumericalConsistencyError,
                     ParseError, ResourceError)
from .forms import ClassGroup, QuadForm, class_group, compose, count_usable_characters, reduce
from .generic import GenericLSeries, generic_engine, kronecker_series, read_glf, write_glf
from .gfun import Precision, g_base, g_derivs
from .pipeline import ThetaRun, theta_run
from .theta import char_coeffs, coefficient_rows, rep_numbers
from .zeros import ZeroRecord, lowest_zero_stats, one_level_density, refine, scan_zeros

__version__ = "0.1.0"

__all__ = [
    "ClassGroup", "Completion", "ConvergenceError", "Evaluator", "GenericLSeries", "InputError", "InvalidFormError",
    "LFunctionError", "NumericalConsistencyError", "ParseError", "Precision", "QuadForm", "ResourceError",
    "TaylorGrid", "ThetaRun", "ZeroRecord", "build_grid", "char_coeffs", "class_group", "coefficient_rows",
    "compose", "count_usable_characters", "direct_eval", "g_base", "g_derivs", "generic_engine",
    "kronecker_series", "lowest_zero_stats", "one_level_density", "precompute_sums", "read_glf", "reduce",
    "refine", "rep_numbers", "scan_zeros", "theta_run", "write_glf", "z_eval",
]
