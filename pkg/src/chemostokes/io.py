"""Serialization: time-series CSV, binary field snapshots, run metadata,
and the human-readable decay summary."""

from __future__ import annotations

import math
import os

import numpy as np

from .diagnostics import COMPONENT_COLUMNS, CSV_COLUMNS, DiagnosticsRecord, DiagnosticsSeries
from .errors import ValidationError
from .fields import Grid, ScalarField, VectorField
from .integrator import RunMonitors, RunResult, SimState
from . import lyapunov

MAGIC = "CHEMOSTOKES v1"

TIMESERIES_FILE = "timeseries.csv"
COMPONENTS_FILE = "energies.csv"
META_FILE = "meta.txt"
SUMMARY_FILE = "summary.txt"
SNAPSHOT_DIR = "final"


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# --------------------------------------------------------------------------
# time series
# --------------------------------------------------------------------------

def write_timeseries(series: DiagnosticsSeries, path) -> None:
    """Fixed-header CSV, 17 significant digits (lossless float round trip)."""
    if len(series) == 0:
        raise ValidationError("refusing to write an empty time series")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in series.records:
            fh.write(",".join(_fmt(getattr(r, col)) for col in CSV_COLUMNS) + "\n")


def write_energy_components(series: DiagnosticsSeries, path) -> None:
    if len(series) == 0:
        raise ValidationError("refusing to write an empty time series")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(COMPONENT_COLUMNS) + "\n")
        for r in series.records:
            fh.write(",".join(_fmt(getattr(r, col)) for col in COMPONENT_COLUMNS) + "\n")


def _read_csv(path, expected_header):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != ",".join(expected_header):
            raise ValidationError(f"{path}: unexpected header {header!r}")
        rows = []
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(v) for v in line.split(",")])
    return rows


def read_timeseries(path) -> DiagnosticsSeries:
    series = DiagnosticsSeries()
    for row in _read_csv(path, CSV_COLUMNS):
        series.append(DiagnosticsRecord(**dict(zip(CSV_COLUMNS, row))))
    return series


def read_series(run_dir) -> DiagnosticsSeries:
    """Load a stored run: main CSV plus energy components and metadata."""
    series = read_timeseries(os.path.join(run_dir, TIMESERIES_FILE))
    comp_path = os.path.join(run_dir, COMPONENTS_FILE)
    if os.path.exists(comp_path):
        rows = _read_csv(comp_path, COMPONENT_COLUMNS)
        if len(rows) != len(series):
            raise ValidationError(f"{comp_path}: row count differs from the time series")
        for r, row in zip(series.records, rows):
            vals = dict(zip(COMPONENT_COLUMNS, row))
            if abs(vals["t"] - r.t) > 1e-9 * (1.0 + abs(r.t)):
                raise ValidationError(f"{comp_path}: time column disagrees with the time series")
            r.ent_n1, r.ent_n2, r.c_sq = vals["ent_n1"], vals["ent_n2"], vals["c_sq"]
    meta_path = os.path.join(run_dir, META_FILE)
    if os.path.exists(meta_path):
        meta = read_meta(meta_path)
        case = meta.get("case", "")
        series.case = case if case in ("coexistence", "exclusion") else None
        series.n1_inf = float(meta.get("n1_inf", "nan"))
        series.n2_inf = float(meta.get("n2_inf", "nan"))
        series.k = float(meta.get("energy_k", 1.0))
        series.l = float(meta.get("energy_l", 1.0))
    return series


# --------------------------------------------------------------------------
# snapshots: one file per field, ASCII header + raw little-endian float64
# --------------------------------------------------------------------------

def write_field_file(path, name: str, grid: Grid, t: float, values: np.ndarray,
                     axis: int | None = None) -> None:
    if not np.isfinite(values).all():
        raise ValidationError(f"refusing to write non-finite field {name!r}")
    n = ",".join(str(v) for v in grid.n)
    h = ",".join(_fmt(v) for v in grid.h)
    header = f"{MAGIC} {name} dim={grid.dim} n={n} h={h} t={_fmt(t)}"
    if axis is not None:
        header += f" axis={axis}"
    with open(path, "wb") as fh:
        fh.write((header + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes(order="F"))


def read_field_file(path):
    """Returns (name, n, h, t, values, axis)."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").strip()
        payload = fh.read()
    parts = header.split()
    if len(parts) < 6 or " ".join(parts[:2]) != MAGIC:
        raise ValidationError(f"{path}: not a {MAGIC} field file")
    name = parts[2]
    kv = dict(p.split("=", 1) for p in parts[3:])
    dim = int(kv["dim"])
    n = tuple(int(v) for v in kv["n"].split(","))
    h = tuple(float(v) for v in kv["h"].split(","))
    t = float(kv["t"])
    axis = int(kv["axis"]) if "axis" in kv else None
    if len(n) != dim or len(h) != dim:
        raise ValidationError(f"{path}: header n/h do not match dim={dim}")
    shape = list(n)
    if axis is not None:
        shape[axis] += 1
    expected = int(np.prod(shape)) * 8
    if len(payload) != expected:
        raise ValidationError(f"{path}: payload has {len(payload)} bytes, expected {expected}")
    values = np.frombuffer(payload, dtype="<f8").reshape(shape, order="F").copy()
    return name, n, h, t, values, axis


_SCALAR_FIELDS = ("n1", "n2", "c", "P")
_AXIS_NAMES = ("x", "y", "z")


def write_snapshot(state: SimState, dirpath) -> None:
    """One file per field in ``dirpath`` (created if needed)."""
    os.makedirs(dirpath, exist_ok=True)
    grid = state.n1.grid
    for name in _SCALAR_FIELDS:
        f: ScalarField = getattr(state, name)
        write_field_file(os.path.join(dirpath, f"{name}.dat"), name, grid, state.t, f.values)
    for k, comp in enumerate(state.u.components):
        name = f"u_{_AXIS_NAMES[k]}"
        write_field_file(os.path.join(dirpath, f"{name}.dat"), name, grid, state.t,
                         comp, axis=k)


def read_snapshot(dirpath, expect_grid: Grid | None = None) -> SimState:
    grids = {}
    scalars = {}
    t = 0.0
    for name in _SCALAR_FIELDS:
        path = os.path.join(dirpath, f"{name}.dat")
        fname, n, h, t, values, axis = read_field_file(path)
        if axis is not None:
            raise ValidationError(f"{path}: scalar field carries a staggering axis")
        grids[name] = (n, h)
        scalars[name] = values
    n, h = grids["n1"]
    grid = Grid(n, h)
    if expect_grid is not None and (grid.n != expect_grid.n or grid.h != expect_grid.h):
        raise ValidationError(
            f"snapshot grid {grid.n}/{grid.h} does not match expected "
            f"{expect_grid.n}/{expect_grid.h}")
    comps = []
    for k in range(grid.dim):
        path = os.path.join(dirpath, f"u_{_AXIS_NAMES[k]}.dat")
        _, _, _, _, values, axis = read_field_file(path)
        if axis != k:
            raise ValidationError(f"{path}: expected staggering axis {k}, got {axis}")
        comps.append(values)
    return SimState(
        t=t, step=0,
        n1=ScalarField(grid, scalars["n1"]), n2=ScalarField(grid, scalars["n2"]),
        c=ScalarField(grid, scalars["c"]), u=VectorField(grid, tuple(comps)),
        P=ScalarField(grid, scalars["P"]))


# --------------------------------------------------------------------------
# metadata and summaries
# --------------------------------------------------------------------------

def write_meta(meta: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in meta.items():
            if isinstance(value, float):
                value = _fmt(value)
            fh.write(f"{key} = {value}\n")


def read_meta(path) -> dict:
    meta = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and "=" in line:
                key, value = (p.strip() for p in line.split("=", 1))
                meta[key] = value
    return meta


def build_summary(series: DiagnosticsSeries, monitors: RunMonitors | None = None) -> str:
    """Evaluate the decay/floor/monotonicity reports against a stored series."""
    lines = []
    if monitors is not None:
        lines.append(f"completed: {monitors.completed}")
        if monitors.abort_reason:
            lines.append(f"abort_reason: {monitors.abort_reason}")
        lines.append(f"steps: {monitors.steps}  wall_seconds: {monitors.wall_seconds:.1f}")
        lines.append(f"min n1: {monitors.min_n1:.3e}  min n2: {monitors.min_n2:.3e}  "
                     f"min c: {monitors.min_c:.3e}")
        lines.append(f"max per-step |c|_inf increase: {monitors.max_c_increase:.3e}")
        lines.append(f"max |div u| / (1 + max|u|): {monitors.div_ratio_max:.3e}")
        lines.append(f"sup_t (|n1|_inf + |n2|_inf): {monitors.sup_linf_sum:.6g}")
        lines.append(f"mass bound ok: {monitors.mass_bound_ok} "
                     f"(worst ratio {monitors.mass_bound_ratio:.9f})")
    ok, first = lyapunov.check_c_monotone(series)
    lines.append(f"|c|_inf nonincreasing: {ok}"
                 + ("" if ok else f" (first violation at record {first})"))
    if series.case is not None:
        t = series.t
        enough = int(np.count_nonzero(t >= lyapunov.DEFAULT_CUTOFF)) >= 3
        if enough:
            coeffs = lyapunov.EnergyCoefficients(series.k, series.l, case=series.case)
            rep = lyapunov.fit_epsilon(series, coeffs)
            lines.append(f"decay at (k={series.k:g}, l={series.l:g}): "
                         f"eps_hat={rep.epsilon_hat:.4g} monotone={rep.monotone} "
                         f"f_integral={rep.f_integral:.4g} "
                         f"integrable_ok={rep.integrable_ok}"
                         + (f" [{rep.message}]" if rep.message else ""))
            search = lyapunov.search_coefficients(series, series.case)
            if search.found:
                c = search.coefficients
                r = search.report
                lines.append(f"coefficient search: k={c.k:.4g} l={c.l:.4g} "
                             f"eps_hat={r.epsilon_hat:.4g} "
                             f"({search.n_admissible} admissible candidates)")
            else:
                lines.append(f"coefficient search: FAILED ({search.message})")
            udecay = lyapunov.check_u_decay(series, None)
            lines.append(f"u decay: passed={udecay.passed} max|u|_2^2={udecay.max_y:.3e} "
                         f"final={udecay.final_y:.3e} fitted_constant={udecay.fitted_constant:.3g}")
            floor = lyapunov.check_n2_floor(series, series.n2_inf)
            lines.append(f"n2 floor: passed={floor.passed} floor={floor.floor:.4g} "
                         f"T*={floor.t_star:.4g} threshold={floor.threshold:.4g}")
        else:
            lines.append("decay checks skipped: fewer than 3 records past the transient cutoff")
    else:
        lines.append("decay checks skipped: unsupported competition regime")
    return "\n".join(lines) + "\n"


def write_run_outputs(result: RunResult, config, out_dir) -> None:
    """Persist everything a stored run needs: CSVs, meta, snapshot, summary."""
    os.makedirs(out_dir, exist_ok=True)
    series = result.series
    write_timeseries(series, os.path.join(out_dir, TIMESERIES_FILE))
    write_energy_components(series, os.path.join(out_dir, COMPONENTS_FILE))
    meta = {
        "case": series.case or "unsupported",
        "n1_inf": series.n1_inf,
        "n2_inf": series.n2_inf,
        "energy_k": series.k,
        "energy_l": series.l,
        "completed": int(result.monitors.completed),
        "abort_reason": result.monitors.abort_reason or "-",
        "steps": result.monitors.steps,
        "wall_seconds": result.monitors.wall_seconds,
        "sup_linf_n1": result.monitors.sup_linf_n1,
        "sup_linf_n2": result.monitors.sup_linf_n2,
        "sup_linf_sum": result.monitors.sup_linf_sum,
        "final_energy": series.records[-1].energy,
        "chi1": config.params.chi1,
        "chi2": config.params.chi2,
        "mu1": config.params.mu1,
        "mu2": config.params.mu2,
    }
    write_meta(meta, os.path.join(out_dir, META_FILE))
    if np.isfinite(result.state.n1.values).all():
        write_snapshot(result.state, os.path.join(out_dir, SNAPSHOT_DIR))
    with open(os.path.join(out_dir, SUMMARY_FILE), "w", encoding="utf-8") as fh:
        fh.write(build_summary(series, result.monitors))
