"""Exception hierarchy shared by every wolfsim module."""

from __future__ import annotations


class WolfsimError(Exception):
    """Base class for all wolfsim errors."""


class ConfigError(WolfsimError, ValueError):
    """Invalid parameter or configuration value.

    ``field`` carries a dotted path (``"body.poisson"``) when the error comes
    from a config file, so the CLI can point at the offending key.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class GridError(ConfigError):
    """A derived grid is too coarse or a contact point misses the interior."""


class InstabilityError(WolfsimError, RuntimeError):
    """The explicit scheme produced a non-finite or runaway state."""

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        super().__init__(message if step is None else f"{message} (step {step})")


class SimulationError(WolfsimError, RuntimeError):
    """A per-note simulation failed; wraps the cause with the note number."""

    def __init__(self, note: int, cause: Exception):
        self.note = note
        self.cause = cause
        super().__init__(f"note {note}: {cause}")
