import os
import yaml
from typing import Any, Dict, Optional
from dataclasses import dataclass
from pathlib import Path

try:
    from dotenv import load_dotenv
except ImportError:

    def load_dotenv(*args, **kwargs):
        return False


PROJECT_ROOT = Path(__file__).resolve().parents[2]

VALID_COEFFICIENT_METHODS = ("phase-average", "hypergeometric")
VALID_BLOCKAGE_MODES = ("thinned", "geometric")
VALID_POINTING_MODES = ("exact", "gaussian")


@dataclass
class ChannelConfig:
    series_tol: float = 1e-10
    j_cap: int = 1000
    phase_nodes: int = 1024
    coefficient_method: str = "phase-average"
    normalization_tol: float = 1e-8


@dataclass
class QuadratureConfig:
    d0_nodes: int = 24
    hpe_nodes: int = 12
    panel_nodes: int = 16
    cutoff_rel: float = 1e-8
    series_tol: float = 1e-8
    l_cap: int = 400
    clamp_tol: float = 1e-6
    printed_rho: bool = False


@dataclass
class SimulationConfig:
    workers: int = 1
    chunk_size: int = 2000
    blockage_mode: str = "thinned"
    pointing_mode: str = "exact"
    confidence_level: float = 0.95
    min_trials: int = 1000


@dataclass
class OutputConfig:
    dir: str = "results"
    float_format: str = "%.6g"
    manifest_sidecar: bool = True


@dataclass
class LoggingConfig:
    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file: str = "logs/coverage_lab.log"
    max_file_size: str = "10MB"
    backup_count: int = 5


@dataclass
class DevelopmentConfig:
    debug_mode: bool = False
    show_progress: bool = True


class Config:
    """Application settings: numerics, engine defaults, output and logging."""

    def __init__(self, config_path: Optional[str] = None):
        load_dotenv()
        self.config_path = self._resolve_path(config_path)
        self._load_config()
        self._apply_env_overrides()
        self._validate_config()

    @staticmethod
    def _resolve_path(config_path: Optional[str]) -> Path:
        if config_path:
            return Path(config_path)
        env_path = os.getenv("THZCOV_CONFIG")
        if env_path:
            return Path(env_path)
        local = Path("config.yaml")
        if local.exists():
            return local
        return PROJECT_ROOT / "config.yaml"

    def _load_config(self) -> None:
        try:
            with open(self.config_path, "r", encoding="utf-8") as file:
                config_data: Dict[str, Any] = yaml.safe_load(file) or {}

            self.channel = ChannelConfig(**config_data.get("channel", {}))
            self.quadrature = QuadratureConfig(**config_data.get("quadrature", {}))
            self.simulation = SimulationConfig(**config_data.get("simulation", {}))
            self.output = OutputConfig(**config_data.get("output", {}))
            self.logging = LoggingConfig(**config_data.get("logging", {}))
            self.development = DevelopmentConfig(**config_data.get("development", {}))

        except FileNotFoundError:
            raise FileNotFoundError(f"Configuration file not found: {self.config_path}")
        except yaml.YAMLError as e:
            raise ValueError(f"Invalid YAML configuration: {e}")
        except TypeError as e:
            raise ValueError(f"Error loading configuration: {e}")

    def _apply_env_overrides(self) -> None:
        level = os.getenv("THZCOV_LOG_LEVEL")
        if level:
            self.logging.level = level.upper()
        workers = os.getenv("THZCOV_WORKERS")
        if workers:
            try:
                self.simulation.workers = int(workers)
            except ValueError:
                raise ValueError(f"THZCOV_WORKERS must be an integer, got {workers!r}")

    def _validate_config(self) -> None:
        if self.channel.coefficient_method not in VALID_COEFFICIENT_METHODS:
            raise ValueError(
                f"Invalid coefficient method: {self.channel.coefficient_method}"
            )
        if self.channel.j_cap < 1:
            raise ValueError("channel.j_cap must be at least 1")
        if self.channel.series_tol <= 0 or self.quadrature.series_tol <= 0:
            raise ValueError("Series tolerances must be positive")

        for name in ("d0_nodes", "hpe_nodes", "panel_nodes"):
            if getattr(self.quadrature, name) < 2:
                raise ValueError(f"quadrature.{name} must be at least 2")

        if self.simulation.blockage_mode not in VALID_BLOCKAGE_MODES:
            raise ValueError(f"Invalid blockage mode: {self.simulation.blockage_mode}")
        if self.simulation.pointing_mode not in VALID_POINTING_MODES:
            raise ValueError(f"Invalid pointing mode: {self.simulation.pointing_mode}")
        if self.simulation.workers < 1:
            raise ValueError("simulation.workers must be at least 1")
        if not 0 < self.simulation.confidence_level < 1:
            raise ValueError("simulation.confidence_level must lie in (0, 1)")

        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if self.logging.level.upper() not in valid_levels:
            raise ValueError(f"Invalid log level: {self.logging.level}")

    def is_debug_mode(self) -> bool:
        return self.development.debug_mode

    def get_output_dir(self) -> str:
        return self.output.dir

    def get_log_file(self) -> str:
        return self.logging.file


_config: Optional[Config] = None


def get_config() -> Config:
    global _config
    if _config is None:
        _config = Config()
    return _config


def reload_config(config_path: Optional[str] = None) -> Config:
    global _config
    _config = Config(config_path)
    return _config
