"""Exception hierarchy shared by every attrinet module."""


class AttrinetError(Exception):
    """Base class; ``code`` is the short error name surfaced by the CLI."""

    code = "Error"


class ParamError(AttrinetError, ValueError):
    code = "InvalidParams"


class ZeroEntry(ParamError):
    code = "ZeroEntry"


class DimensionMismatch(ParamError):
    code = "DimensionMismatch"


class BadGamma(ParamError):
    code = "BadGamma"


class MissingNu(ParamError):
    code = "MissingNu"


class MalformedInput(AttrinetError, ValueError):
    code = "MalformedInput"


class NoConvergence(AttrinetError, RuntimeError):
    code = "NoConvergence"


class SingularSystem(AttrinetError, RuntimeError):
    code = "SingularSystem"


class NotTreeCase(AttrinetError, ValueError):
    code = "NotTreeCase"


class TooLarge(AttrinetError, ValueError):
    code = "TooLarge"


class ConditionFailed(AttrinetError, ValueError):
    code = "ConditionFailed"


class EmptySeed(AttrinetError, ValueError):
    code = "EmptySeed"


class ExplosionGuard(AttrinetError, RuntimeError):
    code = "ExplosionGuard"


class CycleDetected(AttrinetError, ValueError):
    code = "CycleDetected"


class InsufficientData(AttrinetError, ValueError):
    code = "InsufficientData"


class FringeNotTree(AttrinetError, ValueError):
    code = "FringeNotTree"


class HashMismatch(AttrinetError, ValueError):
    code = "HashMismatch"


class ConfigError(AttrinetError, ValueError):
    code = "ConfigError"
