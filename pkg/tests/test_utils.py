"""Tests for file, validation and exception utilities."""

import io
import os

import pytest

from src.late_sensitivity.models import ExperimentConfig, ForgeConfig
from src.late_sensitivity.utils.exceptions import (
    DataLoadError,
    FileOperationError,
    PreconditionViolatedError,
    ValidationError,
)
from src.late_sensitivity.utils.file_utils import (
    read_text,
    save_text,
    validate_output_path,
    write_output,
)
from src.late_sensitivity.utils.validation import (
    validate_config,
    validate_finite,
    validate_positive,
    validate_probability,
    validate_seed,
)


class TestValidation:
    """Test input validation helpers."""

    def test_validate_probability_bounds(self):
        """Test that the closed unit interval is the default."""
        assert validate_probability(0.0, "k2") == 0.0
        assert validate_probability(1.0, "k1") == 1.0
        with pytest.raises(ValidationError) as info:
            validate_probability(1.2, "k1")
        assert info.value.field == "k1"
        assert "[0, 1]" in str(info.value)

    def test_validate_probability_open_ends(self):
        """Test excluded endpoints."""
        with pytest.raises(ValidationError, match=r"\(0, 1\)"):
            validate_probability(0.0, "pz", allow_zero=False, allow_one=False)

    def test_validate_finite(self):
        """Test that NaN and infinity are rejected."""
        with pytest.raises(ValidationError):
            validate_finite(float("nan"), "beta")
        with pytest.raises(ValidationError):
            validate_finite(float("inf"), "beta")
        assert validate_finite(-0.5, "beta") == -0.5

    def test_validate_positive(self):
        """Test strict and weak positivity."""
        assert validate_positive(0.0, "eta", allow_zero=True) == 0.0
        with pytest.raises(ValidationError, match="positive"):
            validate_positive(0.0, "M")

    def test_validate_seed(self):
        """Test that seeds are nonnegative integers."""
        assert validate_seed(7) == 7
        for bad in (-1, 1.5, None, True):
            with pytest.raises(ValidationError):
                validate_seed(bad)

    def test_validate_config_names_field(self):
        """Test that a config ValueError becomes a ValidationError with its field."""
        with pytest.raises(ValidationError) as info:
            validate_config(ForgeConfig(eps1=1.5))
        assert info.value.field == "eps1"
        validate_config(ExperimentConfig(seed=1))


class TestExceptions:
    """Test exception messages."""

    def test_data_load_error_truncates_lines(self):
        """Test that long line lists are shortened."""
        error = DataLoadError("bad", file_path="x.csv", line_numbers=range(2, 40), column="y")
        text = str(error)
        assert "in column 'y'" in text
        assert "(38 rows)" in text

    def test_precondition_message(self):
        """Test that the failed inequality appears in the message."""
        error = PreconditionViolatedError("eta > 0", "eta = 0")
        assert error.inequality == "eta > 0"
        assert str(error) == (
            "Forge error during preconditions: precondition 'eta > 0' does not hold (eta = 0)"
        )


class TestFileUtils:
    """Test reading and writing text."""

    def test_save_creates_parent(self, temp_dir):
        """Test that missing directories are created."""
        path = save_text("hello\n", temp_dir / "nested" / "out.json")
        assert path.read_text() == "hello\n"

    def test_save_overwrites_and_drops_backup(self, temp_dir):
        """Test that the backup file is removed after a successful write."""
        target = temp_dir / "out.json"
        target.write_text("old")
        save_text("new", target)
        assert target.read_text() == "new"
        assert not (temp_dir / "out.json.backup").exists()

    def test_output_path_is_directory(self, temp_dir):
        """Test that a directory is not a valid output path."""
        with pytest.raises(FileOperationError, match="directory"):
            validate_output_path(temp_dir)

    @pytest.mark.skipif(os.geteuid() == 0, reason="root can write anywhere")
    def test_read_only_directory(self, temp_dir):
        """Test that an unwritable directory is reported."""
        locked = temp_dir / "locked"
        locked.mkdir()
        locked.chmod(0o500)
        try:
            with pytest.raises(FileOperationError, match="not writable"):
                validate_output_path(locked / "out.json")
        finally:
            locked.chmod(0o700)

    def test_write_output_to_stdout(self, capsys):
        """Test that None and '-' write to stdout."""
        write_output("a\n", None)
        write_output("b\n", "-")
        assert capsys.readouterr().out == "a\nb\n"

    def test_read_text(self, temp_dir, monkeypatch):
        """Test file and stdin reads and a missing path."""
        path = temp_dir / "in.txt"
        path.write_text("content")
        assert read_text(path) == "content"
        monkeypatch.setattr("sys.stdin", io.StringIO("piped"))
        assert read_text("-") == "piped"
        with pytest.raises(FileOperationError, match="does not exist"):
            read_text(temp_dir / "missing.txt")
        with pytest.raises(FileOperationError, match="not a file"):
            read_text(temp_dir)
