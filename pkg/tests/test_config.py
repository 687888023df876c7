import numpy as np
import pytest

from chemostokes.config import parse_config, parse_config_text
from chemostokes.errors import ValidationError
from chemostokes.model import LinearPotential, RegimeTag, classify_regime

MINIMAL = "control.end_time = 1.0\n"


class TestParsing:
    def test_minimal_file_fills_defaults(self):
        cfg = parse_config_text(MINIMAL)
        assert cfg.control.cfl_safety == 0.4
        assert cfg.control.cadence == 0.1
        assert cfg.grid.n == (64, 64)
        assert cfg.grid.h == (1.0 / 64, 1.0 / 64)
        assert cfg.params.mu1 == 1.0
        assert cfg.ic_preset == "uniform+cosine-perturbation"

    def test_unknown_key_rejected(self):
        with pytest.raises(ValidationError, match="unknown key 'xi0'"):
            parse_config_text(MINIMAL + "xi0 = 3\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ValidationError, match="duplicate"):
            parse_config_text(MINIMAL + "model.mu1 = 1\nmodel.mu1 = 2\n")

    def test_missing_required_key(self):
        with pytest.raises(ValidationError, match="control.end_time"):
            parse_config_text("model.mu1 = 1\n")

    def test_type_mismatch_names_key(self):
        with pytest.raises(ValidationError, match="model.mu1"):
            parse_config_text(MINIMAL + "model.mu1 = fast\n")

    def test_invalid_params_reported(self):
        with pytest.raises(ValidationError, match="mu1 must be > 0"):
            parse_config_text(MINIMAL + "model.mu1 = 0\n")

    def test_comments_and_blanks_ignored(self):
        cfg = parse_config_text("# a comment\n\ncontrol.end_time = 2.0  # inline\n")
        assert cfg.control.end_time == 2.0

    def test_garbage_line_rejected(self):
        with pytest.raises(ValidationError, match="key = value"):
            parse_config_text("control.end_time\n")

    def test_reads_from_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(MINIMAL + "grid.n = 8,8\n")
        cfg = parse_config(path)
        assert cfg.grid.n == (8, 8)

    def test_explicit_spacing_overrides_unit_box(self):
        cfg = parse_config_text(MINIMAL + "grid.n = 8,8\ngrid.h = 0.5,0.25\n")
        assert cfg.grid.lengths == (4.0, 2.0)


class TestPotentialSpec:
    def test_linear_padded_to_dim(self):
        cfg = parse_config_text(MINIMAL + "model.phi = linear:0.1\n")
        assert cfg.params.phi.g == (0.1, 0.0)

    def test_zero_potential(self):
        cfg = parse_config_text(MINIMAL + "model.phi = zero\n")
        assert cfg.params.phi is None

    def test_too_many_components(self):
        with pytest.raises(ValidationError, match="phi"):
            parse_config_text(MINIMAL + "model.phi = linear:1,2,3\n")

    def test_unknown_form(self):
        with pytest.raises(ValidationError, match="phi"):
            parse_config_text(MINIMAL + "model.phi = quadratic:1\n")


class TestInitialConditions:
    def test_cosine_preset_positive_and_distinct(self):
        cfg = parse_config_text(MINIMAL + "grid.n = 16,16\n")
        state = cfg.initial_state()
        assert state.n1.values.min() > 0
        assert state.n2.values.min() > 0
        assert not np.allclose(state.n1.values, state.n2.values)
        assert np.all(state.c.values == 1.0)
        assert state.u.max_abs() == 0.0

    def test_overlarge_amplitude_rejected(self):
        # cell centers miss the cosine extremum by h/2, so 1.0 still squeaks by
        cfg = parse_config_text(MINIMAL + "ic.amplitude = 1.2\n")
        with pytest.raises(ValidationError, match="strictly positive"):
            cfg.initial_state()

    def test_two_bump_preset(self):
        cfg = parse_config_text(MINIMAL + "grid.n = 16,16\nic.preset = two-bump\n")
        state = cfg.initial_state()
        assert state.n1.values.min() >= 1.0
        # bumps sit in opposite corners
        assert np.argmax(state.n1.values) != np.argmax(state.n2.values)

    def test_unknown_preset(self):
        with pytest.raises(ValidationError, match="preset"):
            parse_config_text(MINIMAL + "ic.preset = vortex\n")

    def test_from_file_requires_path(self):
        with pytest.raises(ValidationError, match="ic.path"):
            parse_config_text(MINIMAL + "ic.preset = from-file\n")

    def test_custom_c0(self):
        cfg = parse_config_text(MINIMAL + "ic.c0 = 0.25\n")
        state = cfg.initial_state()
        assert np.all(state.c.values == 0.25)

    def test_from_file_round_trip(self, tmp_path):
        from chemostokes.integrator import run
        from chemostokes.io import write_snapshot
        cfg = parse_config_text("control.end_time = 0.02\ngrid.n = 8,8\n")
        result = run(cfg)
        snap = tmp_path / "snap"
        write_snapshot(result.state, snap)
        cfg2 = parse_config_text(
            f"control.end_time = 0.02\ngrid.n = 8,8\n"
            f"ic.preset = from-file\nic.path = {snap}\n")
        state = cfg2.initial_state()
        assert state.t == 0.0
        np.testing.assert_array_equal(state.n1.values, result.state.n1.values)
        result2 = run(cfg2.replace(control=cfg2.control))
        assert result2.monitors.completed

    def test_tabulated_potential_from_file(self, tmp_path):
        from chemostokes.fields import Grid
        from chemostokes.io import write_field_file
        from chemostokes.integrator import run
        grid = Grid((8, 8), (0.125, 0.125))
        x, y = grid.meshgrid()
        path = tmp_path / "phi.dat"
        write_field_file(path, "phi", grid, 0.0, 0.1 * x + 0.05 * y)
        cfg = parse_config_text(
            f"control.end_time = 0.02\ngrid.n = 8,8\nmodel.phi = file:{path}\n")
        assert cfg.params.phi is not None
        result = run(cfg)
        assert result.monitors.completed

    def test_regime_flows_from_params(self):
        cfg = parse_config_text(MINIMAL + "model.a1 = 1.5\n")
        assert classify_regime(cfg.params).tag is RegimeTag.EXCLUSION
