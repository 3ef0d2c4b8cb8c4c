"""
Exception hierarchy for pnstruct.
Every diagnostic raised by the analysis modules derives from PetriNetError.
"""
from typing import Optional


class PetriNetError(Exception):
    """Base class for all pnstruct errors."""


# Net validation

class NetValidationError(PetriNetError):
    """A candidate net description violates the net definition."""


class EmptyPlaces(NetValidationError):
    pass


class EmptyTransitions(NetValidationError):
    pass


class Disconnected(NetValidationError):
    pass


class DanglingArcEndpoint(NetValidationError):
    pass


class DuplicateId(NetValidationError):
    pass


class PlaceToPlaceArc(NetValidationError):
    """Arc joins two places or two transitions."""


class InvalidIdentifier(NetValidationError):
    pass


# Lookups

class UnknownNode(PetriNetError):
    pass


class UnknownPlace(UnknownNode):
    pass


class UnknownTransition(UnknownNode):
    pass


class MarkingPlaceUnknown(PetriNetError):
    pass


class UnknownMarking(PetriNetError):
    pass


class UnknownCluster(PetriNetError):
    pass


class EmptyNodeSet(PetriNetError):
    pass


# Firing

class NotEnabled(PetriNetError):
    pass


class NotEnabledAtStep(NotEnabled):
    """A firing sequence hits a disabled transition."""

    def __init__(self, step: int, transition: str):
        self.step = step
        self.transition = transition
        super().__init__(f"transition {transition} not enabled at step {step}")


# State space

class UnboundedNet(PetriNetError):
    def __init__(self, message: str = "net is unbounded", witness=None):
        self.witness = witness
        super().__init__(message)


class LimitExceeded(PetriNetError):
    def __init__(self, message: str = "exploration limit exceeded", states: Optional[int] = None):
        self.states = states
        super().__init__(message)


# Structure

class CapExceeded(PetriNetError):
    pass


class ComponentLimitExceeded(PetriNetError):
    pass


class EmptyCover(PetriNetError):
    pass


class NotAComponent(PetriNetError):
    pass


class NotAWorkflowNet(PetriNetError):
    pass


class IdCollisionOnTStar(PetriNetError):
    pass


# Realizable paths

class PathNotElementary(PetriNetError):
    pass


class PathLeavesComponent(PetriNetError):
    pass


class StartUnmarked(PetriNetError):
    pass


# Formats

class FormatError(PetriNetError):
    """Base for parse failures."""


class LpnSyntaxError(FormatError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DuplicateDecl(LpnSyntaxError):
    pass


class UnknownArcEndpoint(LpnSyntaxError):
    pass


class MalformedXml(FormatError):
    pass


class UnsupportedNetType(FormatError):
    pass


class ValidationError(FormatError):
    """Parsed input does not form a valid net; wraps the validation error."""

    def __init__(self, cause: NetValidationError):
        self.cause = cause
        super().__init__(f"{type(cause).__name__}: {cause}")


# Generators

class SizeOutOfRange(PetriNetError):
    pass
