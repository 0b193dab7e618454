"""Spherical mean transform inversion for centers on an ellipse, via Mathieu functions."""

from .bessel import RadialGrid, bessel_i0, bessel_j, bessel_j0, hankel0_forward, hankel0_inverse
from .expansion import closed_form_coefficients, compute_coefficients, eval_j0_expansion
from .forward import CircleAperture, EllipseAperture, Sinogram, build_sinogram, read_sinogram, write_sinogram
from .geometry import CartesianPoint, EllipticPoint, distance, jacobian, to_cartesian, to_elliptic
from .images import ImageGrid, read_image_csv, write_image_csv, write_pgm
from .mathieu import MathieuBasis, build_basis, eval_ce, eval_ce_mod, eval_se, eval_se_mod
from .metrics import error_metrics, sample_truth
from .norton import NortonConfig, reconstruct_circle
from .phantom import Bump, PhantomSpec, analytic_smt_gaussian, default_phantom, gaussian
from .reconstruct import ReconConfig, reconstruct_grid, reconstruct_points

__version__ = "0.1.0"
