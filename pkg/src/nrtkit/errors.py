"""Exception types shared across the package."""


class NRTError(Exception):
    """Base class for all package errors."""


class ResourceBoundError(NRTError):
    """A configured size bound would be exceeded (never silently truncated)."""


class ValidationError(NRTError):
    """Input data does not satisfy a structural requirement."""


class PreconditionError(NRTError):
    """An operation was called outside its domain."""


class ParseError(NRTError):
    def __init__(self, message: str, text: str = "", pos: int = -1):
        self.text = text
        self.pos = pos
        if pos >= 0:
            message = f"{message} at position {pos}: {text[:pos]}<HERE>{text[pos:]}"
        super().__init__(message)
