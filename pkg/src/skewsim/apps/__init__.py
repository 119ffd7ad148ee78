"""Built-in applications and the application contract."""

from .base import AppError, AppFactory, AppInstance, reference_run
from .dp import DPApp, canonical_partitions
from .hhd import HHDApp
from .histo import HistoApp
from .hll import HLLApp
from .pagerank import PRApp

__all__ = [
    "AppError",
    "AppFactory",
    "AppInstance",
    "DPApp",
    "HHDApp",
    "HLLApp",
    "HistoApp",
    "PRApp",
    "canonical_partitions",
    "make_app",
    "reference_run",
]


def make_app(name: str, **kwargs) -> AppFactory:
    """Application factory by CLI name."""
    name = name.lower()
    if name == "histo":
        return HistoApp(**kwargs)
    if name == "dp":
        return DPApp(**kwargs)
    if name == "hll":
        return HLLApp(**kwargs)
    if name == "hhd":
        return HHDApp(**kwargs)
    if name == "pr":
        if "vertices" not in kwargs:
            raise AppError("pr requires a vertex count")
        return PRApp(**kwargs)
    raise AppError(f"unknown application {name!r}")
