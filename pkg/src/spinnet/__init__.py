"""Density-matrix simulation of spin-photon network building blocks and repeaters."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("spinnet")
except PackageNotFoundError:  # running from a source checkout
    __version__ = "0.0.0"

from .config import Tolerances, get_tolerances, set_tolerances  # noqa: E402

__all__ = ["Tolerances", "__version__", "get_tolerances", "set_tolerances"]
