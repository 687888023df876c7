"""chemostokes: two-species chemotaxis-Stokes simulator with competitive
kinetics, plus the diagnostics that verify boundedness and stabilization
along computed trajectories."""

from .config import RunConfig, parse_config, parse_config_text
from .diagnostics import DiagnosticsRecord, DiagnosticsSeries
from .errors import SimulationAbort, ValidationError
from .fields import (Grid, ScalarField, VectorField, init_from_function,
                     integrate, norm, vector_norm)
from .integrator import (RunResult, SimState, StepControl, SimWorkspace,
                         compute_dt, consumption_term, reaction_terms, run, step)
from .lyapunov import (CoefficientSearch, DecayReport, EnergyCoefficients,
                       check_c_monotone, check_n2_floor, check_u_decay,
                       dissipation_coexistence, dissipation_exclusion,
                       energy_coexistence, energy_exclusion, fit_epsilon,
                       search_coefficients)
from .model import (LinearPotential, PhysicalParams, Regime, RegimeTag,
                    SteadyState, TabulatedPotential, classify_regime,
                    steady_state, validate_params)
from .operators import (advect, chemo_divergence, divergence, gradient,
                        laplacian_neumann)
from .stokes import StokesWorkspace, buoyancy_force, pressure_poisson, project, stokes_step
from .sweep import SweepSummary, run_sweep

__version__ = "0.1.0"
