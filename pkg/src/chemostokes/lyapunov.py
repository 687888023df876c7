"""Energy/dissipation functionals and trajectory decay verification.

Two cases, matching the two stable regimes:

  coexistence: E = int(n1 - N1 - N1 log(n1/N1)) + k int(n2 - N2 - N2 log(n2/N2))
               + (l/2) int(c^2),       F = int((n1-N1)^2) + int((n2-N2)^2)
  exclusion:   E = int(n1) + k int(n2 - 1 - log(n2)) + (l/2) int(c^2),
               F = int(n1^2) + int((n2-1)^2)

Both energies are normalized so they vanish exactly at the limit state. The
entropy integrand s -> s - log1p(s) is evaluated by a series for small s;
the naive form loses all significance once densities are within ~1e-7 of
their limits, which is exactly the regime the decay checks probe.

Admissible (k, l) weights are not known a priori; ``search_coefficients``
scans a logarithmic grid and certifies the best empirically monotone pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import DiagnosticsSeries
from .errors import ValidationError
from .fields import ScalarField

F_FLOOR = 1e-14
MONOTONE_SLACK = 1e-12
DEFAULT_CUTOFF = 1.0


@dataclass(frozen=True)
class EnergyCoefficients:
    """Weights of the second-species entropy term and the signal term."""

    k: float
    l: float
    case: str = "coexistence"

    def __post_init__(self):
        if not (self.k > 0 and self.l > 0):
            raise ValidationError(f"energy coefficients must be positive, got k={self.k}, l={self.l}")
        if self.case not in ("coexistence", "exclusion"):
            raise ValidationError(f"unknown energy case {self.case!r}")


@dataclass
class DecayReport:
    epsilon_hat: float
    monotone: bool
    f_integral: float
    transient_cutoff: float
    f_below_floor: bool
    integrable_ok: bool
    n_samples: int
    message: str = ""


@dataclass
class CoefficientSearch:
    found: bool
    coefficients: EnergyCoefficients | None
    report: DecayReport | None
    n_admissible: int
    message: str = ""


def _relative_entropy(values: np.ndarray, ref: float) -> np.ndarray:
    """Pointwise ref * f(s), s = (v - ref)/ref, f(s) = s - log1p(s) >= 0."""
    s = (values - ref) / ref
    small = np.abs(s) < 1e-3
    direct = s - np.log1p(s)
    series = s * s * (0.5 + s * (-1.0 / 3.0 + s * (0.25 - 0.2 * s)))
    return ref * np.where(small, series, direct)


def _require_positive(f: ScalarField, name: str) -> None:
    if f.values.min() <= 0.0:
        raise ValidationError(f"{name} must be strictly positive to evaluate the entropy")


def energy_components_coexistence(n1: ScalarField, n2: ScalarField, c: ScalarField,
                                  N1: float, N2: float) -> tuple[float, float, float]:
    """Unweighted pieces (ent_n1, ent_n2, int c^2) of the coexistence energy."""
    _require_positive(n1, "n1")
    _require_positive(n2, "n2")
    vol = n1.grid.cell_volume
    e1 = float(np.sum(_relative_entropy(n1.values, N1))) * vol
    e2 = float(np.sum(_relative_entropy(n2.values, N2))) * vol
    c2 = float(np.sum(c.values**2)) * vol
    return e1, e2, c2


def energy_components_exclusion(n1: ScalarField, n2: ScalarField,
                                c: ScalarField) -> tuple[float, float, float]:
    """Unweighted pieces (int n1, ent_n2 about 1, int c^2) of the exclusion energy."""
    _require_positive(n2, "n2")
    vol = n1.grid.cell_volume
    e1 = float(np.sum(n1.values)) * vol
    e2 = float(np.sum(_relative_entropy(n2.values, 1.0))) * vol
    c2 = float(np.sum(c.values**2)) * vol
    return e1, e2, c2


def energy_coexistence(state, coeffs: EnergyCoefficients, N1: float, N2: float) -> float:
    e1, e2, c2 = energy_components_coexistence(state.n1, state.n2, state.c, N1, N2)
    return e1 + coeffs.k * e2 + 0.5 * coeffs.l * c2


def dissipation_coexistence(state, N1: float, N2: float) -> float:
    vol = state.n1.grid.cell_volume
    return float(np.sum((state.n1.values - N1) ** 2) + np.sum((state.n2.values - N2) ** 2)) * vol


def energy_exclusion(state, coeffs: EnergyCoefficients) -> float:
    e1, e2, c2 = energy_components_exclusion(state.n1, state.n2, state.c)
    return e1 + coeffs.k * e2 + 0.5 * coeffs.l * c2


def dissipation_exclusion(state) -> float:
    vol = state.n1.grid.cell_volume
    return float(np.sum(state.n1.values**2) + np.sum((state.n2.values - 1.0) ** 2)) * vol


# --------------------------------------------------------------------------
# trajectory checks
# --------------------------------------------------------------------------

def _decay_from_arrays(t: np.ndarray, E: np.ndarray, F: np.ndarray,
                       cutoff: float) -> DecayReport:
    sel = t >= cutoff
    if int(np.count_nonzero(sel)) < 3:
        raise ValidationError(
            f"need at least 3 records past t={cutoff:g} to fit a decay rate "
            f"(got {int(np.count_nonzero(sel))})")
    ts, Es, Fs = t[sel], E[sel], F[sel]
    monotone = bool(np.all(np.diff(Es) <= MONOTONE_SLACK * (1.0 + np.abs(Es[:-1]))))
    dE = (Es[2:] - Es[:-2]) / (ts[2:] - ts[:-2])
    Fmid = Fs[1:-1]
    usable = Fmid > F_FLOOR
    f_integral = float(np.trapezoid(Fs, ts))
    if not usable.any():
        return DecayReport(
            epsilon_hat=0.0, monotone=monotone, f_integral=f_integral,
            transient_cutoff=cutoff, f_below_floor=True,
            integrable_ok=True, n_samples=len(ts),
            message="F below floor along the whole window")
    eps = float(np.min(-dE[usable] / Fmid[usable]))
    eps = max(eps, 0.0)
    integrable_ok = True
    if eps > 0.0:
        integrable_ok = bool(f_integral <= (Es[0] / eps) * 1.05)
    return DecayReport(
        epsilon_hat=eps, monotone=monotone, f_integral=f_integral,
        transient_cutoff=cutoff, f_below_floor=False,
        integrable_ok=integrable_ok, n_samples=len(ts))


def fit_epsilon(series: DiagnosticsSeries, coeffs: EnergyCoefficients | None = None,
                cutoff: float = DEFAULT_CUTOFF) -> DecayReport:
    """Best empirical rate eps with dE/dt <= -eps F past the transient.

    dE/dt comes from centered differences of the recorded energy; the rate is
    the minimum of (-dE/dt)/F over samples where F exceeds the floor. The
    integrability cross-check verifies int F dt <= E(cutoff)/eps within 5%.
    """
    t = series.t
    if coeffs is None:
        E = series.column("energy")
    else:
        E = (series.column("ent_n1") + coeffs.k * series.column("ent_n2")
             + 0.5 * coeffs.l * series.column("c_sq"))
    F = series.column("dissipation")
    return _decay_from_arrays(t, E, F, cutoff)


def search_coefficients(series: DiagnosticsSeries, case: str,
                        cutoff: float = DEFAULT_CUTOFF,
                        grid_points: int = 25) -> CoefficientSearch:
    """Scan k, l over a logarithmic grid for admissible energy weights.

    A candidate is admissible when its energy is nonincreasing past the
    cutoff. Among admissible candidates the one maximizing the fitted rate
    wins; ties break toward (k, l) = (1, 1). Reports failure explicitly when
    nothing is monotone rather than returning a violating pair.
    """
    if case not in ("coexistence", "exclusion"):
        raise ValidationError(f"unknown energy case {case!r}")
    t = series.t
    e1 = series.column("ent_n1")
    e2 = series.column("ent_n2")
    c2 = series.column("c_sq")
    F = series.column("dissipation")
    if np.isnan(e1).any() or np.isnan(e2).any():
        raise ValidationError("series lacks energy components; was the run diagnosed?")
    values = np.logspace(-2.0, 2.0, grid_points)
    best = None
    n_admissible = 0
    for k in values:
        for l in values:
            report = _decay_from_arrays(t, e1 + k * e2 + 0.5 * l * c2, F, cutoff)
            if not report.monotone:
                continue
            n_admissible += 1
            tie = abs(np.log10(k)) + abs(np.log10(l))
            key = (-report.epsilon_hat, tie)
            if best is None or key < best[0]:
                best = (key, k, l, report)
    if best is None:
        return CoefficientSearch(
            found=False, coefficients=None, report=None, n_admissible=0,
            message="no (k, l) candidate gives a monotone energy")
    _, k, l, report = best
    coeffs = EnergyCoefficients(k=float(k), l=float(l), case=case)
    return CoefficientSearch(found=True, coefficients=coeffs, report=report,
                             n_admissible=n_admissible)


def check_c_monotone(series: DiagnosticsSeries,
                     slack: float = MONOTONE_SLACK) -> tuple[bool, int | None]:
    """True when the recorded max-norm of c never increases beyond the slack."""
    if len(series) == 0:
        raise ValidationError("empty series")
    linf = series.column("linf_c")
    rises = np.nonzero(np.diff(linf) > slack)[0]
    if rises.size:
        return False, int(rises[0] + 1)
    return True, None


@dataclass
class UDecayReport:
    passed: bool
    max_y: float
    final_y: float
    trailing_mean_F: float
    fitted_constant: float


def check_u_decay(series: DiagnosticsSeries, n_inf) -> UDecayReport:
    """Verify the kinetic energy of u collapses once the densities settle.

    y = |u|_2^2 must end below 10% of its running maximum; the trailing-window
    mean of F calibrates the constant tying the residual stirring to the
    remaining density deviations.
    """
    t = series.t
    y = series.column("l2_u") ** 2
    F = series.column("dissipation")
    max_y = float(y.max())
    final_y = float(y[-1])
    window = t >= t[0] + 0.75 * (t[-1] - t[0])
    mean_F = float(F[window].mean()) if window.any() else 0.0
    fitted = final_y / mean_F if mean_F > 0 else 0.0
    passed = max_y == 0.0 or final_y <= 0.1 * max_y
    return UDecayReport(passed=passed, max_y=max_y, final_y=final_y,
                        trailing_mean_F=mean_F, fitted_constant=fitted)


@dataclass
class FloorReport:
    passed: bool
    floor: float
    t_star: float
    threshold: float
    min_overall: float


def check_n2_floor(series: DiagnosticsSeries, n2_inf: float) -> FloorReport:
    """Earliest T* past which min n2 stays at or above n2_inf / 2."""
    t = series.t
    m = series.column("min_n2")
    suffix_min = np.minimum.accumulate(m[::-1])[::-1]
    threshold = 0.5 * n2_inf
    idx = np.nonzero(suffix_min >= threshold)[0]
    if idx.size:
        i = int(idx[0])
        return FloorReport(passed=True, floor=float(suffix_min[i]),
                           t_star=float(t[i]), threshold=threshold,
                           min_overall=float(m.min()))
    return FloorReport(passed=False, floor=float(suffix_min[0]),
                       t_star=float("inf"), threshold=threshold,
                       min_overall=float(m.min()))
