import numpy as np
import pytest

from chemostokes.errors import ValidationError
from chemostokes.fields import (Grid, ScalarField, VectorField, init_from_function,
                                integrate, norm, vector_norm)


class TestGrid:
    def test_rejects_too_few_cells(self):
        with pytest.raises(ValidationError):
            Grid((2, 4), (0.1, 0.1))

    def test_rejects_nonpositive_spacing(self):
        with pytest.raises(ValidationError):
            Grid((4,), (0.0,))

    def test_rejects_4d(self):
        with pytest.raises(ValidationError):
            Grid((4, 4, 4, 4), (0.1,) * 4)

    def test_geometry(self):
        g = Grid((4, 8), (0.5, 0.25))
        assert g.dim == 2
        assert g.lengths == (2.0, 2.0)
        assert g.cell_volume == pytest.approx(0.125)
        assert g.volume == pytest.approx(4.0)
        assert np.allclose(g.cell_centers(0), [0.25, 0.75, 1.25, 1.75])


class TestIntegrate:
    def test_constant_times_volume(self):
        g = Grid((4, 4, 4), (0.5, 0.5, 0.5))  # box of volume 8
        assert integrate(ScalarField.full(g, 1.0)) == pytest.approx(8.0)

    def test_zero(self):
        g = Grid((5,), (0.3,))
        assert integrate(ScalarField.zeros(g)) == 0.0

    def test_hand_sum_1d(self):
        g = Grid((4,), (0.25,))
        f = ScalarField(g, np.array([1.0, 2.0, 3.0, 4.0]))
        assert integrate(f) == pytest.approx(2.5, rel=1e-15)

    def test_linearity(self, rng):
        g = Grid((6, 5), (0.2, 0.3))
        f = ScalarField(g, rng.standard_normal(g.n))
        h = ScalarField(g, rng.standard_normal(g.n))
        combo = ScalarField(g, 2.5 * f.values - 1.25 * h.values)
        expect = 2.5 * integrate(f) - 1.25 * integrate(h)
        assert integrate(combo) == pytest.approx(expect, rel=1e-12, abs=1e-14)

    def test_nonfinite_names_cell(self):
        g = Grid((4, 4), (1.0, 1.0))
        values = np.ones(g.n)
        values[2, 3] = np.nan
        with pytest.raises(ValidationError, match=r"\(2, 3\)"):
            integrate(ScalarField(g, values))


class TestNorm:
    def test_constant_field(self):
        g = Grid((4, 4), (0.5, 0.5))  # volume 4
        f = ScalarField.full(g, -3.0)
        assert norm(f, np.inf) == 3.0
        assert norm(f, 1) == pytest.approx(3.0 * 4.0)
        assert norm(f, 2) == pytest.approx(3.0 * 2.0)

    def test_mixed_signs_unit_weights(self):
        g = Grid((3,), (1.0,))
        f = ScalarField(g, np.array([3.0, -4.0, 0.0]))
        assert norm(f, np.inf) == 4.0
        assert norm(f, 1) == pytest.approx(7.0)

    def test_l2_of_ones_3x3(self):
        g = Grid((3, 3), (1.0, 1.0))
        assert norm(ScalarField.full(g, 1.0), 2) == pytest.approx(3.0)

    def test_absolute_homogeneity(self, rng):
        g = Grid((5, 4), (0.3, 0.2))
        f = ScalarField(g, rng.standard_normal(g.n))
        for p in (1, 2, np.inf):
            scaled = ScalarField(g, -2.5 * f.values)
            assert norm(scaled, p) == pytest.approx(2.5 * norm(f, p), rel=1e-13)

    def test_unsupported_order(self):
        g = Grid((3,), (1.0,))
        with pytest.raises(ValueError):
            norm(ScalarField.zeros(g), 3)


class TestVectorField:
    def test_face_shapes(self):
        g = Grid((4, 6), (0.1, 0.1))
        v = VectorField.zeros(g)
        assert v.components[0].shape == (5, 6)
        assert v.components[1].shape == (4, 7)

    def test_vector_norms(self):
        g = Grid((4, 4), (0.5, 0.5))
        v = VectorField.zeros(g)
        v.components[0][2, 1] = -3.0
        assert vector_norm(v, np.inf) == 3.0
        assert vector_norm(v, 2) == pytest.approx(np.sqrt(9.0 * 0.25))


class TestInitFromFunction:
    def test_constant(self):
        g = Grid((4, 4), (0.25, 0.25))
        f = init_from_function(g, lambda x, y: 1.0)
        assert np.all(f.values == 1.0)

    def test_cosine_perturbation_positive(self):
        g = Grid((16,), (1.0 / 16,))
        f = init_from_function(g, lambda x: 1.0 + 0.1 * np.cos(2 * np.pi * x),
                               positive=True)
        assert f.values.min() > 0.89

    def test_zero_sample_rejected_when_positive(self):
        g = Grid((4,), (0.25,))
        with pytest.raises(ValidationError, match="strictly positive"):
            init_from_function(g, lambda x: x - x, positive=True, name="n1")

    def test_samples_cell_centers(self):
        g = Grid((4,), (0.5,))
        f = init_from_function(g, lambda x: x)
        assert np.allclose(f.values, [0.25, 0.75, 1.25, 1.75])
