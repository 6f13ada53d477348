"""
Tests for configuration management.
"""

import pytest
from pydantic import ValidationError

from autocrat.core.config import Settings, settings


@pytest.mark.unit
class TestSettings:
    """Test defaults, validators and environment overrides."""

    def test_defaults(self):
        s = Settings(_env_file=None)
        assert s.PROJECT_NAME == "Autocrat"
        assert s.DEFAULT_TOL == 1e-9
        assert s.TIE_FACTOR == 8.0
        assert s.DRIFT_FACTOR == 64.0
        assert s.DEFAULT_EPISODES == 100_000
        assert s.DEFAULT_HORIZON == 20
        assert s.CONFIDENCE == 0.99
        assert s.THREADS >= 1

    def test_module_instance(self):
        assert isinstance(settings, Settings)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("AUTOCRAT_DEFAULT_TOL", "1e-6")
        monkeypatch.setenv("AUTOCRAT_LOG_LEVEL", "debug")
        monkeypatch.setenv("AUTOCRAT_THREADS", "3")
        s = Settings(_env_file=None)
        assert s.DEFAULT_TOL == 1e-6
        assert s.LOG_LEVEL == "DEBUG"
        assert s.THREADS == 3

    def test_unprefixed_env_ignored(self, monkeypatch):
        monkeypatch.setenv("DEFAULT_TOL", "0.5")
        assert Settings(_env_file=None).DEFAULT_TOL == 1e-9

    @pytest.mark.parametrize("field", ["DEFAULT_TOL", "TIE_FACTOR", "DRIFT_FACTOR"])
    def test_rejects_nonpositive(self, field):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, **{field: 0.0})

    @pytest.mark.parametrize("value", [0.0, 1.0, 1.5])
    def test_rejects_bad_confidence(self, value):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, CONFIDENCE=value)

    def test_rejects_zero_episodes(self):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, DEFAULT_EPISODES=0)

    def test_rejects_unknown_format(self):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, LOG_FORMAT="xml")
