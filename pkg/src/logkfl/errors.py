"""Exception hierarchy.  Every error raised on purpose derives from LogKflError."""


class LogKflError(Exception):
    pass


class NonFreeGroup(LogKflError):
    pass


class NotAComplex(LogKflError):
    pass


class UnsupportedTensor(LogKflError):
    pass


class NonInvertibleTwist(LogKflError):
    pass


class SizeBound(LogKflError):
    pass


class NotSurjective(LogKflError):
    pass


class NotStabilized(LogKflError):
    pass


class BadTower(LogKflError):
    pass


class UnsupportedBase(LogKflError):
    pass


class UnsupportedModule(LogKflError):
    pass


class MalformedRows(LogKflError):
    pass


class NonFiniteResidueField(LogKflError):
    pass
