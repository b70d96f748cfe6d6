"""Exception hierarchy shared by all steelnav modules."""


class SteelNavError(Exception):
    """Base class for all steelnav errors."""


# --- cloud ---------------------------------------------------------------

class ParseError(SteelNavError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvalidRange(SteelNavError):
    pass


class InvalidLeaf(SteelNavError):
    pass


class DegenerateCloud(SteelNavError):
    pass


class NoPlane(SteelNavError):
    pass


class WrongFrame(SteelNavError):
    pass


# --- boundary ------------------------------------------------------------

class EmptyInput(SteelNavError):
    pass


class InvalidAlpha(SteelNavError):
    pass


class EmptyBoundary(SteelNavError):
    pass


# --- switching -----------------------------------------------------------

class DegenerateFrame(SteelNavError):
    pass


class InconsistentInput(SteelNavError):
    pass


# --- segmentation --------------------------------------------------------

class TooFewPoints(SteelNavError):
    pass


class SingularCovariance(SteelNavError):
    pass


# --- graph ---------------------------------------------------------------

class DegenerateCluster(SteelNavError):
    pass


# --- route ---------------------------------------------------------------

class UnknownVertex(SteelNavError):
    pass


class OddCardinality(SteelNavError):
    pass


class Disconnected(SteelNavError):
    pass


class DisconnectedEndpoints(SteelNavError):
    pass


class EmptyGraph(SteelNavError):
    pass


class ParityViolation(SteelNavError):
    pass


class TooLarge(SteelNavError):
    pass


# --- planner -------------------------------------------------------------

class EmptyBoundaries(SteelNavError):
    pass


class StartInvalid(SteelNavError):
    pass


class GoalInvalid(SteelNavError):
    pass


class NoPathFound(SteelNavError):
    pass


# --- synth / cli ---------------------------------------------------------

class InvalidSpec(SteelNavError):
    pass


class ConfigError(SteelNavError):
    pass
