"""Exception types shared across the package."""


class HeraldghzError(Exception):
    """Base class for package errors."""


class CapacityError(HeraldghzError):
    """A requested computation exceeds a configured size cap."""


class BasisMismatchError(HeraldghzError, ValueError):
    """Two states/operators live on incompatible Fock bases."""


class DegenerateInputError(HeraldghzError, ValueError):
    """Input carries no usable statistical weight (e.g. zero subspace mass)."""


class ConfigError(HeraldghzError, ValueError):
    """An experiment configuration file violates the schema."""
