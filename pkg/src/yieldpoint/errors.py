# File: yieldpoint/errors.py

class YieldpointError(Exception):
    """Base class for all Yieldpoint errors."""

class LexError(YieldpointError):
    """
    Raised when the source contains a character no token starts with.
    .line / .column locate it, .diagnostic holds the machine-readable form.
    """
    def __init__(self, message: str, line: int, column: int, diagnostic=None):
        super().__init__(message)
        self.line = line
        self.column = column
        self.diagnostic = diagnostic

class ParseError(YieldpointError):
    """
    Raised when the token stream does not fit the grammar.
    .line / .column locate the offending token (end of input included).
    """
    def __init__(self, message: str, line: int, column: int, diagnostic=None):
        super().__init__(message)
        self.line = line
        self.column = column
        self.diagnostic = diagnostic

class WellFormednessError(YieldpointError):
    """Raised by strict entry points when check_well_formed() reports violations."""
    def __init__(self, diagnostics):
        super().__init__("; ".join(d.message for d in diagnostics))
        self.diagnostics = list(diagnostics)

class DesugarError(YieldpointError):
    """Raised when a construct cannot be translated into the core language."""
    def __init__(self, message: str, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic

class UnsupportedQueryError(YieldpointError):
    """
    Raised when no conversion applies to a quantified query.
    .query holds the offending expression.
    """
    def __init__(self, message: str, query=None):
        super().__init__(message)
        self.query = query

class IncrementalizationAborted(YieldpointError):
    """Raised when an update to a query dependency cannot be analyzed."""
    def __init__(self, message: str, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic

class StuckError(YieldpointError):
    """Raised by the runtime when no rule applies to a non-final term."""

class TraceError(YieldpointError):
    """Raised for malformed traces or projections that cannot be compared."""

class ConfigError(YieldpointError):
    """Raised for invalid run configuration or command-line overrides."""
