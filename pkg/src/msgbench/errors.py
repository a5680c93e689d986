"""Exception hierarchy shared by every msgbench module."""


class MsgBenchError(Exception):
    """Base class for all msgbench errors."""


class InvalidSpec(MsgBenchError, ValueError):
    """A landscape specification field is out of its valid range."""


class ResamplingExhausted(MsgBenchError):
    """A component could not be placed without breaking dominance."""


class DimensionMismatch(MsgBenchError, ValueError):
    pass


class DimensionTooHigh(MsgBenchError, ValueError):
    pass


class SchemaError(MsgBenchError, ValueError):
    """A landscape file does not follow the documented JSON schema."""


class ZeroBudget(MsgBenchError, ValueError):
    pass


class UnknownAlgorithm(MsgBenchError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown algorithm"


class EmptyCell(MsgBenchError, ValueError):
    pass


class InsufficientValues(MsgBenchError, ValueError):
    pass


class MissingCharacteristic(MsgBenchError, ValueError):
    pass


class EmptyReport(MsgBenchError, ValueError):
    pass
