"""TV-regularized blind deconvolution with an entropic mirror-descent
solver (PRIDA), a projected-gradient baseline, and a coarse-to-fine
pyramid."""

from .types import (Objective, SolverConfig, Trace, load_image, save_image,
                    load_kernel_txt, save_kernel_txt, uniform_kernel, check_kernel)
from .conv import convolve, correlate, data_term, grad_f_data, grad_k_data
from .tv import tv_value, tv_grad
from .simplex import kl, entropic_step, kl_prox, project_simplex, three_point_gap
from .optimizer import (IterateState, NumericalFailure, objective_value,
                        estimate_lipschitz, prida_step, pgd_step, solve)
from .pyramid import build_plan, upscale_image, upscale_kernel, solve_multiscale, deblur
from .robustness import NoiseSpec, add_noise, stability_trial, noise_sweep
from .metrics import EvalReport, endpoint_error, psnr

__version__ = "0.1.0"
