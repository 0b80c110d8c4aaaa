"""Co-authorship-aware research productivity indicators and ranking-distortion analysis."""

from ._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
