"""Near-field scattering by radial potentials: forward maps, emission synthesis and recovery."""

from ._nearfield import *  # noqa: F401,F403
from ._nearfield import __version__  # noqa: F401
