"""
Tests for configuration, logging setup and error helpers
"""

import io
import logging

import pytest
from pydantic import ValidationError

from config import IsolatedSettings, Settings, apply_settings, settings
from utils.exceptions import (AmbiguityError, DomainError, FileFormatError, InconsistencyError,
                              RankOneWitnessError, WitnessError, create_diagnostic, exit_code_for)
from utils.logging_config import ColoredFormatter, setup_logging
from utils.validators import (ProfileValidator, parse_int_list, validate_index_set,
                              validate_seed, validate_tolerance)


class TestSettings:
    """Test library settings and configuration"""

    @pytest.mark.unit
    def test_settings_default_values(self):
        """Test default configuration values"""
        defaults = IsolatedSettings()

        assert defaults.LINALG_TOL == 1e-9
        assert defaults.COMPLEMENT_PROPERTY_MAX_VECTORS == 24
        assert defaults.WITNESS_RESIDUAL_TOL == 1e-10
        assert defaults.WITNESS_RANK_GAP == 1e6
        assert defaults.PAIR_SEARCH_OBJECTIVE_TOL == 1e-16
        assert defaults.BISECTION_TOL == 1e-14
        assert defaults.STABILITY_ZERO_TOL == 1e-8
        assert defaults.DEBUG is False

    @pytest.mark.unit
    def test_environment_override(self, monkeypatch):
        """Test that SPR_ environment variables override defaults"""
        monkeypatch.setenv("SPR_WITNESS_RESTARTS", "3")

        assert Settings().WITNESS_RESTARTS == 3

    @pytest.mark.unit
    def test_isolated_settings_ignore_environment(self, monkeypatch):
        """Test that isolated settings never consult the environment"""
        monkeypatch.setenv("SPR_WITNESS_RESTARTS", "3")

        assert IsolatedSettings().WITNESS_RESTARTS == 8

    @pytest.mark.unit
    @pytest.mark.parametrize("field, value", [
        ("LINALG_TOL", 0.0),
        ("RECOVERY_TOL", -1e-9),
        ("CONSTRUCTION_RETRIES", 0),
        ("WITNESS_RANK_GAP", 1.0),
        ("DEFAULT_SEED", -1),
    ])
    def test_invalid_values_rejected(self, field, value):
        """Test that invalid numeric settings are rejected"""
        with pytest.raises(ValidationError):
            IsolatedSettings(**{field: value})

    @pytest.mark.unit
    def test_apply_settings_updates_shared_instance(self, restore_settings):
        """Test that apply_settings copies values onto the shared instance"""
        apply_settings(IsolatedSettings(WITNESS_RESTARTS=2))

        assert settings.WITNESS_RESTARTS == 2

    @pytest.mark.unit
    def test_log_level_follows_debug(self):
        """Test that DEBUG forces the DEBUG log level"""
        assert IsolatedSettings(DEBUG=True).log_level() == "DEBUG"
        assert IsolatedSettings(LOG_LEVEL="warning").log_level() == "WARNING"


class TestLogging:
    """Test logging configuration"""

    @pytest.mark.unit
    def test_setup_logging_is_idempotent(self):
        """Test that repeated setup does not stack handlers"""
        root = setup_logging("INFO", stream=io.StringIO())
        count = len(root.handlers)
        setup_logging("INFO", stream=io.StringIO())

        assert len(root.handlers) == count

    @pytest.mark.unit
    def test_setup_logging_writes_to_stream(self):
        """Test that messages reach the configured stream without colour codes"""
        stream = io.StringIO()
        setup_logging("DEBUG", stream=stream)
        logging.getLogger("tests").info("mensaje de prueba")

        assert "mensaje de prueba" in stream.getvalue()
        assert "\033[" not in stream.getvalue()

    @pytest.mark.unit
    def test_unknown_level_rejected(self):
        """Test that an unknown level raises ValueError"""
        with pytest.raises(ValueError):
            setup_logging("LOUD", stream=io.StringIO())

    @pytest.mark.unit
    def test_colored_formatter_restores_levelname(self):
        """Test that colouring does not leak into the record"""
        record = logging.LogRecord("x", logging.WARNING, __file__, 1, "hola", None, None)
        ColoredFormatter("%(levelname)s %(message)s").format(record)

        assert record.levelname == "WARNING"


class TestErrors:
    """Test exception helpers"""

    @pytest.mark.unit
    def test_exit_codes(self):
        """Test the mapping from exceptions to exit codes"""
        assert exit_code_for(InconsistencyError("x")) == 4
        assert exit_code_for(AmbiguityError("x")) == 3
        assert exit_code_for(DomainError("x")) == 1
        assert exit_code_for(FileFormatError("x")) == 1
        assert exit_code_for(RuntimeError("x")) == 1

    @pytest.mark.unit
    def test_diagnostic_is_single_line(self):
        """Test that diagnostics fit on one line"""
        message = create_diagnostic(DomainError("primera\nsegunda"))

        assert "\n" not in message
        assert message.startswith("error [DomainError]")

    @pytest.mark.unit
    def test_rank_one_witness_keeps_vector(self):
        """Test that a rank-one witness error carries its kernel vector"""
        error = RankOneWitnessError("rango 1", kernel_vector=[1.0, 0.0])

        assert isinstance(error, WitnessError)
        assert list(error.kernel_vector) == [1.0, 0.0]

    @pytest.mark.unit
    def test_domain_error_is_value_error(self):
        """Test that domain errors are also ValueErrors"""
        assert issubclass(DomainError, ValueError)


class TestValidators:
    """Test argument validation helpers"""

    @pytest.mark.unit
    def test_parse_int_list(self):
        """Test parsing of comma-separated integers"""
        assert parse_int_list("3, 2,2,1", "dims") == [3, 2, 2, 1]

    @pytest.mark.unit
    @pytest.mark.parametrize("text", ["", "3,,2", "a,b", "1.5"])
    def test_parse_int_list_rejects_garbage(self, text):
        """Test that malformed lists raise DomainError"""
        with pytest.raises(DomainError):
            parse_int_list(text, "dims")

    @pytest.mark.unit
    def test_validate_dims(self):
        """Test dimension profile validation"""
        assert ProfileValidator.validate_dims([1, 2, 1], 3, 3) == [1, 2, 1]
        with pytest.raises(DomainError):
            ProfileValidator.validate_dims([1, 3, 1], 3, 3)
        with pytest.raises(DomainError):
            ProfileValidator.validate_dims([1, 2], 3, 3)

    @pytest.mark.unit
    def test_validate_ambient(self):
        """Test ambient dimension validation"""
        assert ProfileValidator.validate_ambient(2) == 2
        for bad in (1, 0, True, 2.5):
            with pytest.raises(DomainError):
                ProfileValidator.validate_ambient(bad)

    @pytest.mark.unit
    def test_validate_index_set(self):
        """Test index set validation"""
        assert validate_index_set([0, 2], 4) == [0, 2]
        with pytest.raises(DomainError):
            validate_index_set([2, 0], 4)
        with pytest.raises(DomainError):
            validate_index_set([1, 1], 4)
        with pytest.raises(DomainError):
            validate_index_set([4], 4)

    @pytest.mark.unit
    def test_tolerance_and_seed(self):
        """Test tolerance and seed validation"""
        assert validate_tolerance(1e-9, "tol") == 1e-9
        assert validate_seed(2**64 - 1) == 2**64 - 1
        with pytest.raises(DomainError):
            validate_tolerance(0.0, "tol")
        with pytest.raises(DomainError):
            validate_seed(2**64)
