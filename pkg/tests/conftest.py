import numpy as np
import pytest

from chemostokes.fields import Grid, ScalarField, VectorField
from chemostokes.model import LinearPotential, PhysicalParams


def default_params(**overrides) -> PhysicalParams:
    base = dict(chi1=0.1, chi2=0.1, a1=0.5, a2=0.5, mu1=1.0, mu2=1.0,
                alpha=1.0, beta=1.0, gamma=1.0, delta=1.0, kappa=0.0,
                phi=LinearPotential([0.1, 0.0]))
    base.update(overrides)
    return PhysicalParams(**base)


def random_scalar(grid: Grid, rng, lo=0.5, hi=1.5) -> ScalarField:
    return ScalarField(grid, lo + (hi - lo) * rng.random(grid.n))


def random_velocity(grid: Grid, rng, scale=0.3) -> VectorField:
    """Random interior face values, no-slip boundaries."""
    v = VectorField.zeros(grid)
    for k in range(grid.dim):
        comp = v.components[k]
        sl = [slice(None)] * grid.dim
        sl[k] = slice(1, grid.n[k])
        comp[tuple(sl)] = scale * rng.standard_normal(comp[tuple(sl)].shape)
    return v


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
