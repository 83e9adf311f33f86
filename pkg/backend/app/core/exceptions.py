# backend/app/core/exceptions.py


class FockBridgeError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(FockBridgeError, ValueError):
    """A module precondition or invariant does not hold."""


class NullProjectionError(DomainError):
    """Symmetrization annihilated the state (wrong symmetry sector)."""

    def __init__(self, detail: str = "input has no component in the requested symmetry sector"):
        super().__init__(f"null projection: {detail}")


class ConfigError(FockBridgeError):
    """Run configuration could not be parsed or validated."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class OutputError(FockBridgeError):
    """Writing an artifact failed."""
