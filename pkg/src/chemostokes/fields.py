"""Rectangular-box grid, cell/face field storage, and discrete reductions.

Scalars (densities, signal, pressure, potential) are cell-centered.
Velocities are face-centered (MAC staggering): component ``k`` lives on the
faces orthogonal to axis ``k``, so its array has ``n[k] + 1`` entries along
that axis. Face index ``i`` along axis ``k`` separates cells ``i-1`` and
``i``; indices ``0`` and ``n[k]`` are domain-boundary faces and carry the
no-slip value 0 for velocities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Grid:
    """Uniform rectangular grid on a box of size ``n[k] * h[k]`` per axis."""

    n: tuple[int, ...]
    h: tuple[float, ...]

    def __post_init__(self):
        n = tuple(int(v) for v in self.n)
        h = tuple(float(v) for v in self.h)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "h", h)
        if not 1 <= len(n) <= 3:
            raise ValidationError(f"grid dimension must be 1, 2 or 3, got {len(n)}")
        if len(h) != len(n):
            raise ValidationError("grid n and h must have the same length")
        if any(v < 3 for v in n):
            raise ValidationError(f"need at least 3 cells per axis, got n={n}")
        if any(not np.isfinite(v) or v <= 0 for v in h):
            raise ValidationError(f"cell spacings must be positive, got h={h}")

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(nk * hk for nk, hk in zip(self.n, self.h))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def volume(self) -> float:
        return self.cell_volume * float(np.prod(self.n))

    def cell_centers(self, axis: int) -> np.ndarray:
        return (np.arange(self.n[axis]) + 0.5) * self.h[axis]

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of cell centers, shaped like a scalar field."""
        axes = [self.cell_centers(k) for k in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def face_shape(self, axis: int) -> tuple[int, ...]:
        s = list(self.n)
        s[axis] += 1
        return tuple(s)


@dataclass
class ScalarField:
    """One real value per cell."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.n:
            raise ValidationError(
                f"scalar values shape {self.values.shape} does not match grid {self.grid.n}"
            )

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros(grid.n))

    @classmethod
    def full(cls, grid: Grid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.n, float(value)))


@dataclass
class VectorField:
    """Face-centered vector data, one array per axis (MAC layout)."""

    grid: Grid
    components: tuple[np.ndarray, ...]

    def __post_init__(self):
        comps = []
        for k, comp in enumerate(self.components):
            comp = np.ascontiguousarray(comp, dtype=np.float64)
            if comp.shape != self.grid.face_shape(k):
                raise ValidationError(
                    f"component {k} shape {comp.shape} does not match "
                    f"face shape {self.grid.face_shape(k)}"
                )
            comps.append(comp)
        if len(comps) != self.grid.dim:
            raise ValidationError("need one component per grid axis")
        self.components = tuple(comps)

    def copy(self) -> "VectorField":
        return VectorField(self.grid, tuple(c.copy() for c in self.components))

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(grid, tuple(np.zeros(grid.face_shape(k)) for k in range(grid.dim)))

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(c))) for c in self.components)


def _first_bad_cell(values: np.ndarray):
    bad = ~np.isfinite(values)
    if not bad.any():
        return None
    return tuple(int(i) for i in np.argwhere(bad)[0])


def assert_finite(f, name: str = "field") -> None:
    """Raise with the first offending cell index if the field is not finite."""
    arrays = f.components if isinstance(f, VectorField) else (f.values,)
    for arr in arrays:
        cell = _first_bad_cell(arr)
        if cell is not None:
            raise ValidationError(f"{name} has non-finite value at cell {cell}")


def assert_noslip(v: VectorField, name: str = "u") -> None:
    """Boundary faces of a velocity field must carry the no-slip value 0."""
    for k, comp in enumerate(v.components):
        lo = comp.take(0, axis=k)
        hi = comp.take(-1, axis=k)
        if np.any(lo != 0.0) or np.any(hi != 0.0):
            raise ValidationError(
                f"{name} violates no-slip: nonzero boundary faces on axis {k}")


def integrate(f: ScalarField) -> float:
    """Midpoint-rule integral: sum of cell values times cell volume."""
    assert_finite(f)
    return float(np.sum(f.values)) * f.grid.cell_volume


def norm(f: ScalarField, p) -> float:
    """Discrete Lp norm with quadrature weight; p is 1, 2 or inf."""
    assert_finite(f)
    if p == np.inf or p == "inf":
        return float(np.max(np.abs(f.values)))
    if p == 1:
        return float(np.sum(np.abs(f.values))) * f.grid.cell_volume
    if p == 2:
        return float(np.sqrt(np.sum(f.values**2) * f.grid.cell_volume))
    raise ValueError(f"unsupported norm order {p!r}")


def vector_norm(v: VectorField, p) -> float:
    """Lp norm of a face-centered field (inf: max over all face values)."""
    for comp in v.components:
        if not np.isfinite(comp).all():
            raise ValidationError("vector field has non-finite values")
    if p == np.inf or p == "inf":
        return v.max_abs()
    if p == 2:
        total = sum(float(np.sum(c**2)) for c in v.components)
        return float(np.sqrt(total * v.grid.cell_volume))
    raise ValueError(f"unsupported norm order {p!r}")


def init_from_function(grid: Grid, fn, positive: bool = False, name: str = "field") -> ScalarField:
    """Sample ``fn`` at cell centers.

    ``fn`` receives one coordinate array per axis and must return values of
    the full grid shape (scalars broadcast). With ``positive=True`` any
    nonpositive sample is rejected: initial densities and signal must be
    strictly positive.
    """
    coords = grid.meshgrid()
    values = np.broadcast_to(np.asarray(fn(*coords), dtype=np.float64), grid.n).copy()
    field = ScalarField(grid, values)
    assert_finite(field, name)
    if positive and values.min() <= 0.0:
        cell = tuple(int(i) for i in np.argwhere(values <= 0.0)[0])
        raise ValidationError(
            f"initial {name} must be strictly positive; "
            f"sample {values[cell]:g} at cell {cell}"
        )
    return field
