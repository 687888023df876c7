"""Physical parameters, hypothesis checks, steady states, and regime classification.

The model couples two competing species densities n1, n2, a consumed signal c,
and a Stokes velocity field u:

    dn1/dt + u.grad(n1) = lap(n1) - chi1 div(n1 grad c) + mu1 n1 (1 - n1 - a1 n2)
    dn2/dt + u.grad(n2) = lap(n2) - chi2 div(n2 grad c) + mu2 n2 (1 - a2 n1 - n2)
    dc/dt  + u.grad(c)  = lap(c) - (alpha n1 + beta n2) c
    du/dt = lap(u) + grad(P) + (gamma n1 + delta n2) grad(phi),   div(u) = 0

with zero-flux boundaries for n1, n2, c and no-slip u.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .fields import Grid, ScalarField, assert_finite


class LinearPotential:
    """Gravitational potential phi(x) = g . x for a constant vector g."""

    def __init__(self, g):
        self.g = tuple(float(v) for v in np.atleast_1d(g))

    def sample(self, grid: Grid) -> ScalarField:
        if len(self.g) != grid.dim:
            raise ValidationError(
                f"potential gradient has {len(self.g)} entries but grid is {grid.dim}D"
            )
        coords = grid.meshgrid()
        values = np.zeros(grid.n)
        for gk, xk in zip(self.g, coords):
            values = values + gk * xk
        return ScalarField(grid, values)

    def __repr__(self):
        return f"LinearPotential(g={self.g})"


class TabulatedPotential:
    """Potential given on the grid itself, one value per cell."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=np.float64)

    def sample(self, grid: Grid) -> ScalarField:
        if self.values.shape != grid.n:
            raise ValidationError(
                f"tabulated potential shape {self.values.shape} does not match grid {grid.n}"
            )
        f = ScalarField(grid, self.values.copy())
        assert_finite(f, "potential")
        return f

    def __repr__(self):
        return f"TabulatedPotential(shape={self.values.shape})"


@dataclass(frozen=True)
class PhysicalParams:
    """All model coefficients plus the potential phi.

    chi1, chi2 : chemotactic sensitivities (>= 0)
    a1, a2     : competition coefficients (>= 0)
    mu1, mu2   : logistic rates (> 0)
    alpha, beta: signal consumption rates (> 0)
    gamma, delta: buoyancy couplings (> 0)
    kappa      : convective switch, must stay 0 (Stokes, not Navier-Stokes)
    phi        : LinearPotential or TabulatedPotential (None means no forcing)
    """

    chi1: float
    chi2: float
    a1: float
    a2: float
    mu1: float
    mu2: float
    alpha: float
    beta: float
    gamma: float
    delta: float
    kappa: float = 0.0
    phi: object = None

    def potential(self) -> object:
        return self.phi if self.phi is not None else None


class RegimeTag(enum.Enum):
    COEXISTENCE = "coexistence"
    EXCLUSION = "exclusion"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    chi_over_mu: float


@dataclass(frozen=True)
class SteadyState:
    """Homogeneous limit state; signal and velocity always vanish."""

    n1_inf: float
    n2_inf: float
    c_inf: float = 0.0
    u_inf: float = 0.0


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.valid:
            return "parameters valid"
        return "; ".join(self.violations)


def validate_params(p: PhysicalParams, grid: Grid | None = None) -> ValidationReport:
    """Collect every violated sign condition; never raises.

    With a grid, additionally checks that the potential samples to finite
    values there (its difference quotients are then finite as well).
    """
    report = ValidationReport()
    for name in ("mu1", "mu2", "alpha", "beta", "gamma", "delta"):
        value = getattr(p, name)
        if not np.isfinite(value) or value <= 0:
            report.violations.append(f"{name} must be > 0 (got {value!r})")
    for name in ("chi1", "chi2", "a1", "a2"):
        value = getattr(p, name)
        if not np.isfinite(value) or value < 0:
            report.violations.append(f"{name} must be >= 0 (got {value!r})")
    if p.kappa != 0.0:
        report.violations.append(
            f"kappa must be 0: the fluid is Stokes, convection is out of scope (got {p.kappa!r})"
        )
    if grid is not None and p.phi is not None:
        try:
            p.phi.sample(grid)
        except ValidationError as exc:
            report.violations.append(f"potential invalid on grid: {exc}")
    return report


def classify_regime(p: PhysicalParams) -> Regime:
    """Total classification of the competition regime.

    Coexistence covers a1, a2 in [0, 1): the noncompetitive boundary a_i = 0
    shares the same limit state formula. Exclusion requires a1 >= 1 > a2 > 0.
    Everything else is unsupported (no theory backs a steady state there).
    """
    chis = max(p.chi1, p.chi2)
    mus = min(p.mu1, p.mu2)
    chi_over_mu = chis / mus if mus > 0 else float("inf")
    if 0.0 <= p.a1 < 1.0 and 0.0 <= p.a2 < 1.0:
        tag = RegimeTag.COEXISTENCE
    elif p.a1 >= 1.0 and 0.0 < p.a2 < 1.0:
        tag = RegimeTag.EXCLUSION
    else:
        tag = RegimeTag.UNSUPPORTED
    return Regime(tag, chi_over_mu)


def steady_state(p: PhysicalParams) -> SteadyState:
    """Limit state of the kinetics: coexistence or competitive exclusion."""
    regime = classify_regime(p)
    if regime.tag is RegimeTag.COEXISTENCE:
        denom = 1.0 - p.a1 * p.a2
        return SteadyState((1.0 - p.a1) / denom, (1.0 - p.a2) / denom)
    if regime.tag is RegimeTag.EXCLUSION:
        return SteadyState(0.0, 1.0)
    raise ValidationError(
        "no supported steady state: need a1, a2 in [0, 1) for coexistence "
        f"or a1 >= 1 > a2 > 0 for exclusion (got a1={p.a1}, a2={p.a2})"
    )
