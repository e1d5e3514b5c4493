"""sasaklab: numerical contact and Sasakian reduction on odd spheres."""

from .jets import BACKEND as JET_BACKEND

__version__ = "0.1.0"
__all__ = ["JET_BACKEND", "__version__"]
