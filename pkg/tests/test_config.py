"""
Tests for run configuration and the error hierarchy.
"""

import pytest
from pydantic import ValidationError

from lepoly.config import RunConfig
from lepoly.errors import (
    BranchPointSearchError,
    GeometryError,
    HypothesisError,
    LepolyError,
    PuiseuxError,
    SheetCollisionError,
    TrackingError,
)


class TestRunConfig:
    """Test defaults, environment overrides and validation."""

    def test_defaults(self, monkeypatch):
        for name in ["LEPOLY_SEED", "LEPOLY_EPSILON", "LEPOLY_MAX_STEP"]:
            monkeypatch.delenv(name, raising=False)
        config = RunConfig(f="x^2+y^3")
        assert config.g == "1"
        assert config.t == "auto"
        assert config.t_magnitude is None
        assert config.seed == 0
        assert config.epsilon == 0.5
        assert config.max_step == 0.02

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("LEPOLY_SEED", "3")
        assert RunConfig(f="x").seed == 3

    def test_explicit_t(self):
        assert RunConfig(f="x", t="1e-3").t_magnitude == pytest.approx(1e-3)
        assert RunConfig(f="x", t=0.25).t_magnitude == 0.25

    def test_rejects_nonpositive_t(self):
        with pytest.raises(ValidationError):
            RunConfig(f="x", t=-1.0)
        with pytest.raises(ValidationError):
            RunConfig(f="x", t="zero")

    def test_rejects_epsilon_out_of_range(self):
        with pytest.raises(ValidationError):
            RunConfig(f="x", epsilon=2.0)

    def test_echo_excludes_output_paths(self):
        echo = RunConfig(f="x", report_path="out.json", workers=2).echo()
        assert "report_path" not in echo
        assert "workers" not in echo
        assert echo["f"] == "x"


class TestErrors:
    """Test exit codes of the error families."""

    def test_exit_codes(self):
        assert LepolyError.exit_code == 5
        assert HypothesisError("bad").exit_code == 2
        assert PuiseuxError("bad").exit_code == 3
        assert BranchPointSearchError("bad").exit_code == 3
        assert TrackingError("bad").exit_code == 4

    def test_families(self):
        assert issubclass(BranchPointSearchError, GeometryError)
        error = SheetCollisionError("sheets met", 0.5 + 0j)
        assert isinstance(error, TrackingError)
        assert error.location == 0.5
        assert "sheets met" in str(error)
