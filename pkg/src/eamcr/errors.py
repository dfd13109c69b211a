"""Exception hierarchy shared by every module."""


class EamcrError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(EamcrError):
    """A document could not be parsed (bad JSON, bad PBM header, ...)."""

    def __init__(self, message, line=None, context=None):
        self.line = line
        self.context = context
        if line is not None:
            message = f"line {line}: {message}"
            if context:
                message = f"{message}\n    {context}"
        super().__init__(message)


class ValidationError(EamcrError, ValueError):
    """A value violates a documented invariant."""

    def __init__(self, field, value, reason):
        self.field = field
        self.value = value
        self.reason = reason
        super().__init__(f"{field}: {reason} (got {value!r})")


class DomainError(EamcrError, ValueError):
    pass


class UnknownTask(EamcrError, KeyError):
    def __str__(self):
        return f"unknown task {self.args[0]!r}"


class UnknownModel(EamcrError, KeyError):
    def __str__(self):
        return f"unknown model {self.args[0]!r}"


class NoCandidates(EamcrError):
    pass


class InfeasibleScenario(EamcrError):
    pass


class DimensionMismatch(EamcrError, ValueError):
    pass


class EmptyInput(EamcrError, ValueError):
    pass
