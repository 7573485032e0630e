"""Many-agent controlled teleportation simulator."""

__version__ = "0.1.0"
