"""Exception hierarchy. Every error carries a short machine-parseable code."""


class ChaosLabError(Exception):
    code = "E_GENERIC"


class EncodingError(ChaosLabError, ValueError):
    code = "E_ENCODING"


class ParseError(ChaosLabError, ValueError):
    code = "E_PARSE"

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class UsageError(ChaosLabError, ValueError):
    code = "E_USAGE"


class ConfigError(ChaosLabError, ValueError):
    code = "E_CONFIG"


class InvariantError(ChaosLabError, ValueError):
    code = "E_INVARIANT"


class _IndexedError(ChaosLabError):
    """Failure while evaluating something at a known position."""

    def __init__(self, message, index=None):
        self.index = index
        prefix = f"[{self.index_name} {index}] " if index is not None else ""
        super().__init__(prefix + message)

    index_name = "index"


class MapError(_IndexedError, ArithmeticError):
    code = "E_MAP"


class DenominatorOverflow(MapError):
    code = "E_DENOM_OVERFLOW"


class FunctionalError(_IndexedError):
    code = "E_FUNCTIONAL"


class ClassifierError(_IndexedError):
    code = "E_CLASSIFIER"
    index_name = "point"


class DeciderError(_IndexedError):
    code = "E_DECIDER"
    index_name = "node"
