"""
Configuration management for delaylmi.

Supports multiple configuration sources with proper precedence:
1. Command-line flags (applied by the CLI, highest priority)
2. Environment variables
3. Project-level .delaylmi.yaml
4. User-level ~/.delaylmi/config.yaml
5. Default values (lowest priority)
"""

import logging
import os
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .models.schema import SolverOptions

logger = logging.getLogger(__name__)

PROJECT_CONFIG_NAMES = [".delaylmi.yaml", ".delaylmi.yml", "delaylmi.yaml"]


class LogLevel(str, Enum):
    """Logging levels."""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class OutputFormat(str, Enum):
    """Table formats for hierarchy output."""

    MARKDOWN = "md"
    CSV = "csv"


class AnalysisSettings(BaseModel):
    """Typed view of a configuration mapping; every field optional."""

    model_config = ConfigDict(extra="forbid", use_enum_values=True)

    feas_tol: Optional[Annotated[float, Field(gt=0.0)]] = None
    duality_gap_tol: Optional[Annotated[float, Field(gt=0.0)]] = None
    max_iterations: Optional[Annotated[int, Field(ge=1)]] = None
    barrier_growth: Optional[Annotated[float, Field(gt=1.0)]] = None
    early_decision: Optional[bool] = None
    jobs: Optional[Annotated[int, Field(ge=1)]] = None
    log_level: Optional[LogLevel] = None
    output_format: Optional[OutputFormat] = None

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_level(cls, v: Any) -> Any:
        return v.upper() if isinstance(v, str) else v


def validate_settings(values: Dict[str, Any], source: str) -> Dict[str, Any]:
    """Keep the entries of values that validate; log and drop the rest"""
    valid: Dict[str, Any] = {}
    for key, value in values.items():
        if key not in AnalysisSettings.model_fields:
            logger.warning(f"Ignoring unknown configuration key {key!r} in {source}")
            continue
        try:
            checked = AnalysisSettings.model_validate({key: value})
        except ValidationError as e:
            reason = e.errors()[0]["msg"]
            logger.warning(f"Invalid value for {key} in {source}: {value!r} ({reason})")
            continue
        if getattr(checked, key) is None:
            logger.warning(f"Invalid value for {key} in {source}: null")
            continue
        valid[key] = getattr(checked, key)
    return valid


@dataclass
class AnalysisConfig:
    """Analysis configuration options"""

    # Solver
    feas_tol: float = 1e-6
    duality_gap_tol: float = 1e-8
    max_iterations: int = 200
    barrier_growth: float = 20.0
    early_decision: bool = False

    # Execution and output
    jobs: int = 1
    log_level: str = "WARNING"
    output_format: str = "md"

    def solver_options(self) -> SolverOptions:
        """Validated solver options; raises pydantic.ValidationError on bad values"""
        return SolverOptions(
            feas_tol=self.feas_tol,
            duality_gap_tol=self.duality_gap_tol,
            max_iterations=self.max_iterations,
            barrier_growth=self.barrier_growth,
            early_decision=self.early_decision,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class ConfigurationLoader:
    """Loads configuration from multiple sources with proper precedence"""

    def __init__(self, project_root: Optional[Path] = None):
        self.project_root = project_root or self._detect_project_root()
        self.user_config_dir = Path.home() / ".delaylmi"
        self.sources: List[Tuple[str, str]] = []

    def _detect_project_root(self) -> Path:
        """Detect project root by looking for common markers"""
        current = Path.cwd()
        markers = [".git", "pyproject.toml", "setup.cfg"] + PROJECT_CONFIG_NAMES

        for parent in [current] + list(current.parents):
            for marker in markers:
                if (parent / marker).exists():
                    return parent

        return current

    def load_config(self) -> AnalysisConfig:
        """Load configuration from all sources with proper precedence"""
        config_dict: Dict[str, Any] = {}
        self.sources = [("defaults", "built-in")]

        user_config = self._load_user_config()
        if user_config:
            config_dict.update(validate_settings(user_config, self.sources[-1][1]))

        project_config = self._load_project_config()
        if project_config:
            config_dict.update(validate_settings(project_config, self.sources[-1][1]))

        env_config = self._load_env_config()
        if env_config:
            self.sources.append(("environment", ", ".join(sorted(env_config))))
        config_dict.update(validate_settings(env_config, "environment"))

        return AnalysisConfig(**config_dict)

    def _read_yaml(self, config_file: Path) -> Optional[Dict[str, Any]]:
        try:
            with open(config_file, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except (yaml.YAMLError, OSError) as e:
            logger.warning(f"Failed to load config from {config_file}: {e}")
            return None
        if not isinstance(data, dict):
            logger.warning(f"Ignoring {config_file}: expected a mapping")
            return None
        return data

    def _load_user_config(self) -> Optional[Dict[str, Any]]:
        """Load user-level configuration from ~/.delaylmi/config.yaml"""
        for name in ["config.yaml", "config.yml"]:
            config_file = self.user_config_dir / name
            if config_file.exists():
                data = self._read_yaml(config_file)
                if data is not None:
                    self.sources.append(("user", str(config_file)))
                return data
        return None

    def _load_project_config(self) -> Optional[Dict[str, Any]]:
        """Load project-level configuration from .delaylmi.yaml"""
        for config_name in PROJECT_CONFIG_NAMES:
            config_file = self.project_root / config_name
            if config_file.exists():
                data = self._read_yaml(config_file)
                if data is not None:
                    self.sources.append(("project", str(config_file)))
                    return data
        return None

    def _load_env_config(self) -> Dict[str, Any]:
        """Load configuration from environment variables"""
        env_config: Dict[str, Any] = {}

        env_mappings = {
            "DELAYLMI_FEAS_TOL": ("feas_tol", float),
            "DELAYLMI_GAP_TOL": ("duality_gap_tol", float),
            "DELAYLMI_MAX_ITERATIONS": ("max_iterations", int),
            "DELAYLMI_BARRIER_GROWTH": ("barrier_growth", float),
            "DELAYLMI_EARLY_DECISION": ("early_decision", bool),
            "DELAYLMI_JOBS": ("jobs", int),
            "DELAYLMI_LOG_LEVEL": "log_level",
            "DELAYLMI_FORMAT": "output_format",
        }

        for env_var, config_key in env_mappings.items():
            env_value = os.environ.get(env_var)
            if env_value is None:
                continue
            if isinstance(config_key, tuple):
                key, converter = config_key
                try:
                    if converter is bool:
                        env_config[key] = env_value.lower() in ("true", "1", "yes", "on")
                    else:
                        env_config[key] = converter(env_value)
                except (ValueError, TypeError) as e:
                    logger.warning(f"Invalid value for {env_var}: {env_value} ({e})")
            else:
                env_config[config_key] = env_value

        return env_config

    def save_project_config(self, config: Dict[str, Any]) -> bool:
        """Save configuration to project config file"""
        try:
            config_file = self.project_root / ".delaylmi.yaml"
            with open(config_file, "w", encoding="utf-8") as f:
                yaml.dump(config, f, default_flow_style=False, sort_keys=True)
            return True
        except (yaml.YAMLError, OSError) as e:
            logger.error(f"Failed to save project config: {e}")
            return False

    def create_default_project_config(self) -> bool:
        return self.save_project_config(AnalysisConfig().to_dict())


def load_configuration(project_root: Optional[Path] = None) -> AnalysisConfig:
    """
    Load delaylmi configuration from all sources.

    Args:
        project_root: Optional project root directory; auto-detected when omitted.

    Returns:
        AnalysisConfig: Complete configuration object
    """
    loader = ConfigurationLoader(project_root)
    return loader.load_config()


def get_config_paths(project_root: Optional[Path] = None) -> Dict[str, Path]:
    """
    Get paths to configuration files.

    Returns:
        Dict mapping config type to file path
    """
    loader = ConfigurationLoader(project_root)

    return {
        "user": loader.user_config_dir / "config.yaml",
        "project": loader.project_root / ".delaylmi.yaml",
        "project_root": loader.project_root,
    }
