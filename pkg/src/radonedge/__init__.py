"""Edge response of kernel-interpolated 3-D Radon inversion."""

from .errors import (ChartError, ConfigError, GeometryError, InputError, NumericError, RadonEdgeError,
                     RangeError)
from .kernel import Kernel, PiecewisePolynomial, build_kernel, bspline, psi, tail_integral, verify_assumptions
from .phantom import Ball, Phantom, ball_radon, boundary_point, jump_params, two_ball_phantom
from .sphere_grid import SphereGrid, build_grid, chart_at, direction
from .reconstruct import (AnalyticProvider, Sinogram, TableProvider, build_sinogram, read_sinogram,
                          reconstruct_point, reconstruct_points, reconstruct_profile, write_sinogram)
from .edge_theory import (EdgeProfile, GenericityReport, compare_profiles, edge_profile, genericity_report,
                          two_ball_probe, predicted_response, remote_convergence_check)
from .ud_diag import FracSequence, discrepancy_2d, frac_points, shear_map, star_discrepancy_1d, weyl_sum

__version__ = "0.1.0"

__all__ = [
    "RadonEdgeError", "InputError", "GeometryError", "ChartError", "RangeError", "NumericError", "ConfigError",
    "Kernel", "PiecewisePolynomial", "build_kernel", "bspline", "psi", "tail_integral", "verify_assumptions",
    "Ball", "Phantom", "ball_radon", "boundary_point", "jump_params", "two_ball_phantom",
    "SphereGrid", "build_grid", "chart_at", "direction",
    "AnalyticProvider", "TableProvider", "Sinogram", "build_sinogram", "read_sinogram", "write_sinogram",
    "reconstruct_point", "reconstruct_points", "reconstruct_profile",
    "EdgeProfile", "GenericityReport", "compare_profiles", "edge_profile", "genericity_report",
    "two_ball_probe", "predicted_response", "remote_convergence_check",
    "FracSequence", "frac_points", "weyl_sum", "star_discrepancy_1d", "discrepancy_2d", "shear_map",
]
