"""Phase estimation in a Mach-Zehnder interferometer with q-deformed coherent and cat states."""
__version__ = "0.1.0"

from .errors import QmziError  # noqa: E402
