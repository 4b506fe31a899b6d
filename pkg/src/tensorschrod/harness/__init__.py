"""Config-driven experiment runner."""
from .cli import main, run
from .config import RunConfig, load_config, parse_config
from .io import export_slice, uniform_field

__all__ = ["main", "run", "RunConfig", "load_config", "parse_config", "export_slice", "uniform_field"]
