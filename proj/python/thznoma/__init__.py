"""THz-band power-domain NOMA simulation toolkit (pybind11 bindings)."""

from ._thznoma import *  # noqa: F401,F403
from ._thznoma import __version__  # noqa: F401
