"""Run configuration: file parsing, defaults, and initial-condition presets.

Config files are flat ``section.key = value`` text, one pair per line, with
``#`` comments. Unknown keys are hard errors so typos cannot silently fall
back to defaults. All quantities are nondimensional.

Example::

    # coexistence experiment
    model.chi1 = 0.1
    model.a1 = 0.5
    grid.n = 64,64
    control.end_time = 40
    ic.preset = uniform+cosine-perturbation
    output.dir = out/coex
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .fields import Grid, ScalarField, VectorField, assert_noslip, init_from_function
from .integrator import SimState, StepControl
from .model import LinearPotential, PhysicalParams, TabulatedPotential, validate_params

IC_PRESETS = ("uniform+cosine-perturbation", "two-bump", "from-file")

# key -> (type tag, default); REQUIRED sentinel means the file must set it.
_REQUIRED = object()
_SCHEMA = {
    "model.chi1": ("float", 0.1),
    "model.chi2": ("float", 0.1),
    "model.a1": ("float", 0.5),
    "model.a2": ("float", 0.5),
    "model.mu1": ("float", 1.0),
    "model.mu2": ("float", 1.0),
    "model.alpha": ("float", 1.0),
    "model.beta": ("float", 1.0),
    "model.gamma": ("float", 1.0),
    "model.delta": ("float", 1.0),
    "model.kappa": ("float", 0.0),
    "model.phi": ("str", "linear:0.1"),
    "grid.n": ("ints", (64, 64)),
    "grid.h": ("floats", None),
    "ic.preset": ("str", "uniform+cosine-perturbation"),
    "ic.amplitude": ("float", 0.1),
    "ic.c0": ("float", 1.0),
    "ic.seed": ("int", 0),
    "ic.path": ("str", ""),
    "control.end_time": ("float", _REQUIRED),
    "control.dt_max": ("float", 0.05),
    "control.cfl_safety": ("float", 0.4),
    "control.cadence": ("float", 0.1),
    "control.positivity": ("str", "reject"),
    "control.blowup_ceiling": ("float", 1e6),
    "control.wall_clock_limit": ("float", 3600.0),
    "energy.k": ("float", 1.0),
    "energy.l": ("float", 1.0),
    "output.dir": ("str", ""),
}


@dataclass
class RunConfig:
    params: PhysicalParams
    grid: Grid
    control: StepControl
    ic_preset: str = "uniform+cosine-perturbation"
    ic_amplitude: float = 0.1
    ic_c0: float = 1.0
    ic_seed: int = 0
    ic_path: str = ""
    energy_k: float = 1.0
    energy_l: float = 1.0
    output_dir: str = ""

    def replace(self, **kwargs) -> "RunConfig":
        return dataclasses.replace(self, **kwargs)

    def initial_state(self) -> SimState:
        return build_initial_state(self)


def _parse_value(key: str, tag: str, raw: str):
    try:
        if tag == "float":
            return float(raw)
        if tag == "int":
            return int(raw)
        if tag == "ints":
            return tuple(int(v.strip()) for v in raw.split(","))
        if tag == "floats":
            return tuple(float(v.strip()) for v in raw.split(","))
        return raw
    except ValueError as exc:
        raise ValidationError(f"key {key}: cannot parse {raw!r} as {tag}") from exc


def _parse_phi(spec: str, dim: int):
    spec = spec.strip()
    if spec in ("zero", "none", "0"):
        return None
    if spec.startswith("linear:"):
        parts = [float(v) for v in spec[len("linear:"):].split(",") if v.strip()]
        if len(parts) > dim:
            raise ValidationError(
                f"model.phi: linear potential has {len(parts)} components but grid is {dim}D")
        g = parts + [0.0] * (dim - len(parts))
        return LinearPotential(g)
    if spec.startswith("file:"):
        from .io import read_field_file
        _, _, _, _, values, _ = read_field_file(spec[len("file:"):])
        return TabulatedPotential(values)
    raise ValidationError(
        f"model.phi: expected 'linear:g1[,g2,g3]', 'zero' or 'file:PATH', got {spec!r}")


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ValidationError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ValidationError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, _SCHEMA[key][0], raw)
    for key, (tag, default) in _SCHEMA.items():
        if key in values:
            continue
        if default is _REQUIRED:
            raise ValidationError(f"{source}: missing required key {key!r}")
        values[key] = default
    return assemble_config(values)


def parse_config(path) -> RunConfig:
    """Read and validate a config file into a RunConfig."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def assemble_config(values: dict) -> RunConfig:
    n = values["grid.n"]
    h = values["grid.h"]
    if h is None:
        h = tuple(1.0 / nk for nk in n)  # unit box by default
    grid = Grid(n, h)

    phi = _parse_phi(values["model.phi"], grid.dim)
    params = PhysicalParams(
        chi1=values["model.chi1"], chi2=values["model.chi2"],
        a1=values["model.a1"], a2=values["model.a2"],
        mu1=values["model.mu1"], mu2=values["model.mu2"],
        alpha=values["model.alpha"], beta=values["model.beta"],
        gamma=values["model.gamma"], delta=values["model.delta"],
        kappa=values["model.kappa"], phi=phi)
    report = validate_params(params, grid)
    if not report.valid:
        raise ValidationError(f"invalid parameters: {report}")

    preset = values["ic.preset"]
    if preset not in IC_PRESETS:
        raise ValidationError(
            f"ic.preset: unknown preset {preset!r}; choose from {IC_PRESETS}")
    if preset == "from-file" and not values["ic.path"]:
        raise ValidationError("ic.preset = from-file requires ic.path")

    control = StepControl(
        end_time=values["control.end_time"],
        dt_max=values["control.dt_max"],
        cfl_safety=values["control.cfl_safety"],
        cadence=values["control.cadence"],
        positivity=values["control.positivity"],
        blowup_ceiling=values["control.blowup_ceiling"],
        wall_clock_limit=values["control.wall_clock_limit"])

    if values["energy.k"] <= 0 or values["energy.l"] <= 0:
        raise ValidationError("energy.k and energy.l must be positive")

    return RunConfig(
        params=params, grid=grid, control=control,
        ic_preset=preset, ic_amplitude=values["ic.amplitude"],
        ic_c0=values["ic.c0"], ic_seed=values["ic.seed"], ic_path=values["ic.path"],
        energy_k=values["energy.k"], energy_l=values["energy.l"],
        output_dir=values["output.dir"])


# --------------------------------------------------------------------------
# initial conditions
# --------------------------------------------------------------------------

def _axis_cosine(grid: Grid, axis: int) -> np.ndarray:
    x = grid.cell_centers(axis)
    shape = [1] * grid.dim
    shape[axis] = grid.n[axis]
    return np.cos(2.0 * math.pi * x / grid.lengths[axis]).reshape(shape)


def _cosine_perturbation(grid: Grid, amplitude: float) -> np.ndarray:
    pert = np.ones(grid.n)
    for k in range(grid.dim):
        pert = pert * _axis_cosine(grid, k)
    return amplitude * pert


def _bump(grid: Grid, center_frac: float, amplitude: float) -> np.ndarray:
    coords = grid.meshgrid()
    width = 0.1 * min(grid.lengths)
    r2 = np.zeros(grid.n)
    for k in range(grid.dim):
        r2 = r2 + (coords[k] - center_frac * grid.lengths[k]) ** 2
    return amplitude * np.exp(-r2 / (2.0 * width**2))


def build_initial_state(config: RunConfig) -> SimState:
    """Construct the t = 0 state for the configured preset.

    Initial densities and signal must be strictly positive; violations are
    rejected here rather than discovered mid-run.
    """
    grid = config.grid
    preset = config.ic_preset
    if preset == "from-file":
        from .io import read_snapshot
        state = read_snapshot(config.ic_path, expect_grid=grid)
        for name, f in (("n1", state.n1), ("n2", state.n2), ("c", state.c)):
            if f.values.min() <= 0.0:
                raise ValidationError(f"initial {name} from {config.ic_path!r} "
                                      "must be strictly positive")
        assert_noslip(state.u, "initial velocity")
        return SimState(0.0, 0, state.n1, state.n2, state.c, state.u, state.P)

    if preset == "uniform+cosine-perturbation":
        # different modes for the two species: their weighted sum is then
        # nonconstant, so the buoyancy force has a nontrivial rotational part
        pert1 = _cosine_perturbation(grid, config.ic_amplitude)
        pert2 = config.ic_amplitude * _axis_cosine(grid, 0) * np.ones(grid.n)
        n1 = init_from_function(grid, lambda *x: 1.0 + pert1, positive=True, name="n1")
        n2 = init_from_function(grid, lambda *x: 1.0 - pert2, positive=True, name="n2")
    else:  # two-bump
        b1 = _bump(grid, 0.25, config.ic_amplitude)
        b2 = _bump(grid, 0.75, config.ic_amplitude)
        n1 = init_from_function(grid, lambda *x: 1.0 + b1, positive=True, name="n1")
        n2 = init_from_function(grid, lambda *x: 1.0 + b2, positive=True, name="n2")
    c = init_from_function(grid, lambda *x: np.full(grid.n, config.ic_c0),
                           positive=True, name="c")
    return SimState(0.0, 0, n1, n2, c,
                    VectorField.zeros(grid), ScalarField.zeros(grid))
