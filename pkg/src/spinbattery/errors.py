"""Exception hierarchy shared across the package.

Each class maps to one failure category surfaced by the CLI exit codes:
config/argument problems, capacity limits, and numerical failures are
kept apart so callers can react differently.
"""


class SpinBatteryError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(SpinBatteryError, ValueError):
    """Tensor extents or state lengths do not line up."""


class DecompositionError(SpinBatteryError, RuntimeError):
    """A matrix factorization failed and the result cannot be trusted."""


class CapacityError(SpinBatteryError, ValueError):
    """Requested size exceeds a documented hard cap."""


class SectorError(SpinBatteryError, RuntimeError):
    """A solver left the zero-magnetization sector it was seeded in."""


class PreparationError(SpinBatteryError, ValueError):
    """An initial state violates a preparation requirement."""


class ConservationError(SpinBatteryError, RuntimeError):
    """A conserved quantity drifted beyond the hard failure bound."""


class ConfigError(SpinBatteryError, ValueError):
    """A run configuration is malformed or violates an invariant."""


class IOFormatError(SpinBatteryError, ValueError):
    """An input file does not match its documented schema."""
