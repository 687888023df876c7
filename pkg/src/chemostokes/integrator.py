"""Coupled time stepping and full simulation runs.

One step is a forward-Euler composite: explicit diffusion, upwind chemotaxis
drift and advection plus kinetics for the densities; the signal update treats
transport explicitly but folds the consumption factor implicitly, which keeps
c positive for any dt; finally the Stokes velocity is advanced with buoyancy
evaluated from the updated densities and projected back onto divergence-free
fields.

Per-step invariants are enforced, not assumed: nonnegativity of n1, n2, c,
the discrete maximum principle for |c|_inf, finiteness, and the projection
quality of u. Violations abort with context rather than silently degrading.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .diagnostics import DiagnosticsRecord, DiagnosticsSeries
from .errors import SimulationAbort, ValidationError
from .fields import Grid, ScalarField, VectorField, integrate, vector_norm
from .lyapunov import (EnergyCoefficients, energy_components_coexistence,
                       energy_components_exclusion)
from .model import PhysicalParams, RegimeTag, classify_regime, steady_state
from .operators import divergence, gradient
from .stokes import StokesWorkspace, _project_arrays, _stokes_step_arrays

NEGATIVITY_ABORT = -1e-13
CMAX_SLACK = 1e-12


@dataclass
class SimState:
    """Full solver state at one time level."""

    t: float
    step: int
    n1: ScalarField
    n2: ScalarField
    c: ScalarField
    u: VectorField
    P: ScalarField


@dataclass
class StepControl:
    """Time-step limits, positivity policy, and output cadence."""

    end_time: float
    dt_max: float = 0.05
    cfl_safety: float = 0.4
    positivity: str = "reject"       # "reject" aborts on scheme-level negativity
    cadence: float = 0.1
    blowup_ceiling: float = 1e6
    wall_clock_limit: float = 3600.0

    def __post_init__(self):
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ValidationError(f"cfl_safety must be in (0, 1], got {self.cfl_safety}")
        if self.positivity not in ("reject", "clip"):
            raise ValidationError(f"positivity must be 'reject' or 'clip', got {self.positivity!r}")
        if self.dt_max <= 0 or self.cadence <= 0:
            raise ValidationError("dt_max and cadence must be positive")
        if self.end_time < 0:
            raise ValidationError("end_time must be nonnegative")


@dataclass
class StepStats:
    """Raw per-step extrema/sums straight from the kernels."""

    min_n1: float
    max_n1: float
    min_n2: float
    max_n2: float
    min_c: float
    max_c: float
    sum_n1: float
    sum_n2: float
    sum_c: float
    grad_c_max: float
    max_u: float
    max_div: float
    dt: float


class SimWorkspace:
    """Buffers and cached static data for one simulation instance."""

    def __init__(self, grid: Grid, params: PhysicalParams, parallel: bool | None = None):
        self.grid = grid
        self.stokes = StokesWorkspace(grid)
        if parallel is None:
            # fork/join overhead beats the gains at desk-scale grids on few
            # cores; opt in explicitly for large grids on wide machines
            parallel = False
        self.parallel = bool(parallel)
        if params.phi is not None:
            self.gphi = gradient(params.phi.sample(grid)).components
        else:
            self.gphi = tuple(np.zeros(grid.face_shape(k)) for k in range(grid.dim))
        self.last_stats: StepStats | None = None


def reaction_terms(n1: ScalarField, n2: ScalarField,
                   p: PhysicalParams) -> tuple[ScalarField, ScalarField]:
    """Pointwise logistic-competition tendencies."""
    r1 = p.mu1 * n1.values * (1.0 - n1.values - p.a1 * n2.values)
    r2 = p.mu2 * n2.values * (1.0 - p.a2 * n1.values - n2.values)
    return ScalarField(n1.grid, r1), ScalarField(n2.grid, r2)


def consumption_term(n1: ScalarField, n2: ScalarField, c: ScalarField,
                     p: PhysicalParams) -> ScalarField:
    """Pointwise signal sink -(alpha n1 + beta n2) c."""
    return ScalarField(c.grid, -(p.alpha * n1.values + p.beta * n2.values) * c.values)


def _limits(minh: float, dim: int, chi: float, grad_c_max: float, max_u: float,
            mu_max: float, density_max: float) -> tuple[float, float, float, float]:
    diffusive = minh * minh / (2.0 * dim)
    drift = minh / (chi * grad_c_max) if chi * grad_c_max > 0 else math.inf
    advective = minh / max_u if max_u > 0 else math.inf
    reaction = 1.0 / (2.0 * mu_max * density_max) if mu_max * density_max > 0 else math.inf
    return diffusive, drift, advective, reaction


def compute_dt(state: SimState, ctrl: StepControl, p: PhysicalParams) -> float:
    """Largest dt satisfying the diffusive, drift, advective and reaction limits."""
    grid = state.n1.grid
    grad_c_max = gradient(state.c).max_abs()
    max_u = state.u.max_abs()
    density_max = max(float(state.n1.values.max()), float(state.n2.values.max()))
    lims = _limits(min(grid.h), grid.dim, max(p.chi1, p.chi2), grad_c_max,
                   max_u, max(p.mu1, p.mu2), density_max)
    smallest = min(lims)
    if not smallest > 0 or not math.isfinite(max_u):
        raise SimulationAbort(
            f"cannot choose a time step: limits {lims} (corrupted state?)",
            step=state.step, t=state.t)
    return min(ctrl.dt_max, ctrl.cfl_safety * smallest)


def _dt_from_stats(stats: StepStats, ctrl: StepControl, p: PhysicalParams,
                   grid: Grid) -> float:
    # grad_c_max is one step stale (the kernel measures the pre-step signal);
    # the cfl_safety margin covers the per-step change.
    lims = _limits(min(grid.h), grid.dim, max(p.chi1, p.chi2), stats.grad_c_max,
                   stats.max_u, max(p.mu1, p.mu2), max(stats.max_n1, stats.max_n2))
    smallest = min(lims)
    if not smallest > 0:
        raise SimulationAbort(f"cannot choose a time step: limits {lims}")
    return min(ctrl.dt_max, ctrl.cfl_safety * smallest)


def _scalar_kernel(grid: Grid, parallel: bool):
    if grid.dim == 1:
        return K.scalar_step_1d
    if grid.dim == 2:
        return K.scalar_step_2d_par if parallel else K.scalar_step_2d
    return K.scalar_step_3d_par if parallel else K.scalar_step_3d


def _enforce_nonnegative(arr: np.ndarray, raw_min: float, name: str, ctrl: StepControl,
                         step: int, t: float) -> float:
    """Clip round-off negatives; abort (or clip) on scheme-level negativity."""
    if raw_min >= 0.0:
        return raw_min
    if raw_min < NEGATIVITY_ABORT and ctrl.positivity == "reject":
        raise SimulationAbort(
            f"{name} went negative (min {raw_min:.6e}); the scheme violated "
            "positivity beyond round-off", step=step, t=t)
    np.maximum(arr, 0.0, out=arr)
    return 0.0


def step(state: SimState, ctrl: StepControl, p: PhysicalParams,
         ws: SimWorkspace, dt: float | None = None) -> SimState:
    """Advance the coupled system by one composite Euler step."""
    grid = ws.grid
    if dt is None:
        dt = compute_dt(state, ctrl, p)
    h = grid.h
    n1 = state.n1.values
    n2 = state.n2.values
    c = state.c.values
    u = state.u.components
    max_c_in = float(c.max())

    kern = _scalar_kernel(grid, ws.parallel)
    args = (n1, n2, c) + u + h + (dt, p.chi1, p.chi2, p.mu1, p.mu2,
                                  p.a1, p.a2, p.alpha, p.beta)
    o1, o2, oc, raw = kern(*args)

    if not (math.isfinite(raw[6]) and math.isfinite(raw[7]) and math.isfinite(raw[8])):
        raise SimulationAbort(
            "non-finite field values; step dump: "
            f"n1 in [{raw[0]:.3e}, {raw[1]:.3e}], n2 in [{raw[2]:.3e}, {raw[3]:.3e}], "
            f"c in [{raw[4]:.3e}, {raw[5]:.3e}], dt={dt:.3e}",
            step=state.step, t=state.t)

    mn1 = _enforce_nonnegative(o1, raw[0], "n1", ctrl, state.step, state.t)
    mn2 = _enforce_nonnegative(o2, raw[2], "n2", ctrl, state.step, state.t)
    mnc = _enforce_nonnegative(oc, raw[4], "c", ctrl, state.step, state.t)

    if raw[5] > max_c_in + CMAX_SLACK:
        raise SimulationAbort(
            f"signal maximum grew: {raw[5]:.16e} > {max_c_in:.16e} + {CMAX_SLACK:g}",
            step=state.step, t=state.t)

    comps, P, max_u, max_div = _stokes_step_arrays(
        u, o1, o2, ws.gphi, p.gamma, p.delta, dt, ws.stokes, ws.parallel)
    if not math.isfinite(max_u):
        raise SimulationAbort("non-finite velocity after the Stokes step",
                              step=state.step, t=state.t)

    ws.last_stats = StepStats(
        min_n1=mn1, max_n1=raw[1], min_n2=mn2, max_n2=raw[3],
        min_c=mnc, max_c=raw[5], sum_n1=raw[6], sum_n2=raw[7], sum_c=raw[8],
        grad_c_max=raw[9], max_u=max_u, max_div=max_div, dt=dt)

    return SimState(
        t=state.t + dt, step=state.step + 1,
        n1=ScalarField(grid, o1), n2=ScalarField(grid, o2), c=ScalarField(grid, oc),
        u=VectorField(grid, comps), P=ScalarField(grid, P))


# --------------------------------------------------------------------------
# full runs
# --------------------------------------------------------------------------

@dataclass
class RunMonitors:
    """Aggregates maintained at every step (not just at output cadence)."""

    steps: int = 0
    min_n1: float = math.inf
    min_n2: float = math.inf
    min_c: float = math.inf
    max_c_increase: float = -math.inf
    div_ratio_max: float = 0.0
    sup_linf_n1: float = 0.0
    sup_linf_n2: float = 0.0
    sup_linf_sum: float = 0.0
    mass_bound_ratio: float = 0.0
    mass_bound_ok: bool = True
    wall_seconds: float = 0.0
    completed: bool = False
    abort_reason: str = ""


@dataclass
class RunResult:
    state: SimState
    series: DiagnosticsSeries
    monitors: RunMonitors


def _steady_info(p: PhysicalParams):
    regime = classify_regime(p)
    if regime.tag is RegimeTag.UNSUPPORTED:
        return None, None
    return regime.tag, steady_state(p)


def make_record(state: SimState, case, steady,
                coeffs: EnergyCoefficients | None, dt: float,
                max_div: float | None = None) -> DiagnosticsRecord:
    """Assemble one diagnostics record from the full state."""
    nan = float("nan")
    if max_div is None:
        max_div = float(np.max(np.abs(divergence(state.u).values)))
    linf_dev1 = linf_dev2 = nan
    e1 = e2 = c2 = energy = dissipation = nan
    vol = state.n1.grid.cell_volume
    if steady is not None:
        linf_dev1 = float(np.max(np.abs(state.n1.values - steady.n1_inf)))
        linf_dev2 = float(np.max(np.abs(state.n2.values - steady.n2_inf)))
        if case is RegimeTag.COEXISTENCE:
            if state.n1.values.min() > 0 and state.n2.values.min() > 0:
                e1, e2, c2 = energy_components_coexistence(
                    state.n1, state.n2, state.c, steady.n1_inf, steady.n2_inf)
            dissipation = float(np.sum((state.n1.values - steady.n1_inf) ** 2)
                                + np.sum((state.n2.values - steady.n2_inf) ** 2)) * vol
        else:
            if state.n2.values.min() > 0:
                e1, e2, c2 = energy_components_exclusion(state.n1, state.n2, state.c)
            dissipation = float(np.sum(state.n1.values ** 2)
                                + np.sum((state.n2.values - 1.0) ** 2)) * vol
        if coeffs is not None and math.isfinite(e1):
            energy = e1 + coeffs.k * e2 + 0.5 * coeffs.l * c2
    c_sq = float(np.sum(state.c.values ** 2)) * vol
    if math.isnan(c2):
        c2 = c_sq
    return DiagnosticsRecord(
        t=state.t,
        mass_n1=integrate(state.n1), mass_n2=integrate(state.n2),
        linf_n1_dev=linf_dev1, linf_n2_dev=linf_dev2,
        linf_c=float(np.max(np.abs(state.c.values))), l2_c=math.sqrt(c_sq),
        linf_u=state.u.max_abs(), l2_u=vector_norm(state.u, 2),
        min_n2=float(state.n2.values.min()),
        energy=energy, dissipation=dissipation, max_divu=max_div, dt=dt,
        ent_n1=e1, ent_n2=e2, c_sq=c2)


def run(config) -> RunResult:
    """Step the system until end_time, emitting diagnostics at the cadence.

    ``config`` provides params, grid, control, and the initial state (see
    ``config.RunConfig``). Raises SimulationAbort on invariant violations or
    blow-up; the partial result is attached to the exception as ``.partial``.
    """
    p: PhysicalParams = config.params
    grid: Grid = config.grid
    ctrl: StepControl = config.control
    state = config.initial_state()

    ws = SimWorkspace(grid, p)
    case, steady = _steady_info(p)
    coeffs = None
    if case is not None:
        coeffs = EnergyCoefficients(config.energy_k, config.energy_l,
                                    case=case.value)

    # start from a no-slip, divergence-free velocity
    comps, _, _, _ = _project_arrays(state.u.components, ws.stokes, ws.parallel)
    state = SimState(state.t, state.step, state.n1, state.n2, state.c,
                     VectorField(grid, comps), state.P)

    monitors = RunMonitors()
    series = DiagnosticsSeries(
        case=None if case is None else case.value,
        n1_inf=steady.n1_inf if steady else float("nan"),
        n2_inf=steady.n2_inf if steady else float("nan"),
        k=coeffs.k if coeffs else 1.0, l=coeffs.l if coeffs else 1.0)
    series.append(make_record(state, case, steady, coeffs, 0.0))

    mass_cap1 = max(integrate(state.n1), grid.volume)
    mass_cap2 = max(integrate(state.n2), grid.volume)
    vol = grid.cell_volume

    t_end = ctrl.end_time
    cadence = ctrl.cadence
    next_tick = cadence
    started = time.perf_counter()
    prev_maxc = float(state.c.values.max())

    try:
        while state.t < t_end - 1e-12 * max(t_end, 1.0):
            if ws.last_stats is None:
                dt = compute_dt(state, ctrl, p)
            else:
                dt = _dt_from_stats(ws.last_stats, ctrl, p, grid)
            dt = min(dt, t_end - state.t)
            state = step(state, ctrl, p, ws, dt=dt)
            s = ws.last_stats
            monitors.steps += 1
            monitors.min_n1 = min(monitors.min_n1, s.min_n1)
            monitors.min_n2 = min(monitors.min_n2, s.min_n2)
            monitors.min_c = min(monitors.min_c, s.min_c)
            monitors.max_c_increase = max(monitors.max_c_increase, s.max_c - prev_maxc)
            prev_maxc = s.max_c
            monitors.div_ratio_max = max(monitors.div_ratio_max,
                                         s.max_div / (1.0 + s.max_u))
            monitors.sup_linf_n1 = max(monitors.sup_linf_n1, s.max_n1)
            monitors.sup_linf_n2 = max(monitors.sup_linf_n2, s.max_n2)
            monitors.sup_linf_sum = max(monitors.sup_linf_sum, s.max_n1 + s.max_n2)
            ratio = max(s.sum_n1 * vol / mass_cap1, s.sum_n2 * vol / mass_cap2)
            monitors.mass_bound_ratio = max(monitors.mass_bound_ratio, ratio)
            if ratio > 1.0 + 1e-6:
                monitors.mass_bound_ok = False
            if max(s.max_n1, s.max_n2) > ctrl.blowup_ceiling:
                raise SimulationAbort(
                    f"density exceeded the blow-up ceiling {ctrl.blowup_ceiling:g}",
                    step=state.step, t=state.t)
            if state.t >= next_tick - 1e-9 * cadence or state.t >= t_end - 1e-12 * max(t_end, 1.0):
                series.append(make_record(state, case, steady, coeffs,
                                          s.dt, s.max_div))
                while next_tick <= state.t + 1e-9 * cadence:
                    next_tick += cadence
            if time.perf_counter() - started > ctrl.wall_clock_limit:
                raise SimulationAbort("wall-clock guard exceeded "
                                      f"({ctrl.wall_clock_limit:g} s)",
                                      step=state.step, t=state.t)
    except SimulationAbort as exc:
        monitors.completed = False
        monitors.abort_reason = exc.reason
        monitors.wall_seconds = time.perf_counter() - started
        exc.partial = RunResult(state, series, monitors)
        raise

    monitors.completed = True
    monitors.wall_seconds = time.perf_counter() - started
    return RunResult(state, series, monitors)
