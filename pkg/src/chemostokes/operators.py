"""Spatial discretizations on the staggered grid.

All transport operators are written in conservative flux form with zero flux
through domain boundaries, so their integrals telescope to zero exactly (up
to round-off) and ``divergence(gradient(f))`` reproduces the Neumann
Laplacian bit for bit.
"""

from __future__ import annotations

import warnings

import numpy as np

from .fields import Grid, ScalarField, VectorField

_DIV_FREE_RTOL = 1e-10


def _face_slices(arr_ndim, axis, lo, hi):
    sl = [slice(None)] * arr_ndim
    sl[axis] = slice(lo, hi)
    return tuple(sl)


def gradient(f: ScalarField) -> VectorField:
    """Face-centered difference quotients; boundary faces are 0 (zero flux)."""
    grid = f.grid
    comps = []
    for k in range(grid.dim):
        g = np.zeros(grid.face_shape(k))
        interior = _face_slices(grid.dim, k, 1, grid.n[k])
        left = _face_slices(grid.dim, k, 0, grid.n[k] - 1)
        right = _face_slices(grid.dim, k, 1, grid.n[k])
        g[interior] = (f.values[right] - f.values[left]) / grid.h[k]
        comps.append(g)
    return VectorField(grid, tuple(comps))


def divergence(v: VectorField) -> ScalarField:
    """Cell-centered divergence of a face field."""
    grid = v.grid
    out = np.zeros(grid.n)
    for k in range(grid.dim):
        comp = v.components[k]
        left = _face_slices(grid.dim, k, 0, grid.n[k])
        right = _face_slices(grid.dim, k, 1, grid.n[k] + 1)
        out += (comp[right] - comp[left]) / grid.h[k]
    return ScalarField(grid, out)


def laplacian_neumann(f: ScalarField) -> ScalarField:
    """Second-order Laplacian with homogeneous Neumann (mirror-ghost) walls.

    Implemented literally as divergence of the face gradient, which is the
    same composition the pressure projection relies on.
    """
    return divergence(gradient(f))


def advect(f: ScalarField, u: VectorField) -> ScalarField:
    """Divergence of the upwind flux u*f.

    Returns the tendency to be subtracted from df/dt. Equals u.grad(f) up to
    first order when u is discretely divergence free; warns when it is not.
    """
    grid = f.grid
    maxdiv = float(np.max(np.abs(divergence(u).values)))
    umax = u.max_abs()
    if maxdiv > _DIV_FREE_RTOL * (1.0 + umax) / min(grid.h):
        warnings.warn(
            f"advecting with max|div u| = {maxdiv:.3e}; "
            "field is not divergence free", stacklevel=2)
    out = np.zeros(grid.n)
    for k in range(grid.dim):
        uf = u.components[k][_face_slices(grid.dim, k, 1, grid.n[k])]
        left = f.values[_face_slices(grid.dim, k, 0, grid.n[k] - 1)]
        right = f.values[_face_slices(grid.dim, k, 1, grid.n[k])]
        flux = uf * np.where(uf > 0.0, left, right)
        interior_flux = np.zeros(grid.face_shape(k))
        interior_flux[_face_slices(grid.dim, k, 1, grid.n[k])] = flux
        lo = interior_flux[_face_slices(grid.dim, k, 0, grid.n[k])]
        hi = interior_flux[_face_slices(grid.dim, k, 1, grid.n[k] + 1)]
        out += (hi - lo) / grid.h[k]
    return ScalarField(grid, out)


def chemo_divergence(n: ScalarField, c: ScalarField, chi: float) -> ScalarField:
    """Divergence of the chemotactic drift flux chi * n * grad(c).

    The density on each face is taken from the donor cell relative to the
    sign of the face gradient of c, which keeps n nonnegative under the CFL
    restriction. Boundary faces carry no flux.
    """
    grid = n.grid
    out = np.zeros(grid.n)
    for k in range(grid.dim):
        left = n.values[_face_slices(grid.dim, k, 0, grid.n[k] - 1)]
        right = n.values[_face_slices(grid.dim, k, 1, grid.n[k])]
        cl = c.values[_face_slices(grid.dim, k, 0, grid.n[k] - 1)]
        cr = c.values[_face_slices(grid.dim, k, 1, grid.n[k])]
        g = (cr - cl) / grid.h[k]
        flux = chi * np.where(g > 0.0, left, right) * g
        padded = np.zeros(grid.face_shape(k))
        padded[_face_slices(grid.dim, k, 1, grid.n[k])] = flux
        lo = padded[_face_slices(grid.dim, k, 0, grid.n[k])]
        hi = padded[_face_slices(grid.dim, k, 1, grid.n[k] + 1)]
        out += (hi - lo) / grid.h[k]
    return ScalarField(grid, out)
