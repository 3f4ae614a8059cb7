from .cache import CacheBackend, CacheManager
from .core import ExperimentConfig, ExperimentRegistry, ExperimentRunner
from .report import InequalityReport

__all__ = [
    "CacheBackend",
    "CacheManager",
    "ExperimentConfig",
    "ExperimentRegistry",
    "ExperimentRunner",
    "InequalityReport",
]
