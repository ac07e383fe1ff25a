"""Exception hierarchy shared by every module of the package."""


class McFarlandError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDescriptor(McFarlandError, ValueError):
    pass


class GroupMismatch(McFarlandError, ValueError):
    pass


class UnsupportedGroup(McFarlandError, ValueError):
    pass


class InvalidSubgroup(McFarlandError, ValueError):
    pass


class InvalidArgument(McFarlandError, ValueError):
    pass


class InvalidField(McFarlandError, ValueError):
    pass


class InvalidDecomposition(McFarlandError, ValueError):
    pass


class NotMcFarlandShaped(McFarlandError, ValueError):
    pass


class HypothesisNotMet(McFarlandError, ValueError):
    """Inputs do not satisfy the hypotheses a structural check relies on."""


class PreconditionViolation(McFarlandError, ValueError):
    pass


class LemmaViolation(McFarlandError, RuntimeError):
    """An object that provably exists could not be found. Indicates a bug."""
