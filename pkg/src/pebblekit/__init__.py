from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version("pebblekit")
except PackageNotFoundError:  # pragma: no cover - running from a checkout
    __version__ = "0.0.0"

__all__ = ["__version__"]
