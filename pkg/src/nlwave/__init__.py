"""Nonlocal elastic wave solver: Legendre-Galerkin and collocation discretizations."""

__version__ = "0.1.0"

from .errors import (CflViolation, ConfigError, GridMismatch, MisalignedSnapshot, NlwaveError,
                     NoTruncation, NonConvergence, RuleTooCoarse, SingularSystem)
from .basis import (QuadratureRule, composite_gauss_rule, gauss_rule, gram_matrix, legendre_eval,
                    legendre_eval_all, project, synthesize)
from .kernel import KernelSpec, kernel_eval, kernel_mass, truncation_radius
from .assembly import (AssembledSystem, assemble_A1, assemble_A2, assemble_load, build_system,
                       default_rule, mass_diagonal)
from .evolve import (SCHEMES, EvolutionState, Integrator, Snapshot, companion_matrix, init_state,
                     modal_multipliers, power_iteration, run, spectral_radius_report, step)
from .collocation import (CollocationGrid, NodalSystem, assemble_collocation, composite_grid,
                          gauss_grid, midpoint_grid, midpoint_grid_2d, run_collocation_1d,
                          run_midpoint_2d)
from .analysis import (MANUFACTURED, BoundsReport, ConvergenceReport, ManufacturedForcing,
                       bounds_report, error_norms, fit_order, local_reference, manufactured_study,
                       solve_manufactured, taylor_coefficients)
