"""Exception hierarchy.

Each family maps onto one CLI exit code (see ``cmlid.cli``).
"""


class CmlidError(Exception):
    exit_code = 3


class ConfigError(CmlidError, ValueError):
    exit_code = 2


class DataError(CmlidError, ValueError):
    """Malformed or unsuitable input data."""

    exit_code = 3


class FormatError(DataError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class UnknownLabel(FormatError):
    def __init__(self, line_no, text):
        self.text = text
        super().__init__(line_no, f"unknown language label {text!r}")


class EmptySurface(FormatError):
    def __init__(self, line_no):
        super().__init__(line_no, "empty surface form")


class EmptyCorpus(DataError):
    def __init__(self, message="corpus contains no sentences"):
        super().__init__(message)


class UnlabeledToken(DataError):
    pass


class TooFewSentences(DataError):
    pass


class LengthMismatch(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class EmptyDocument(DataError):
    pass


class SentenceTooLong(DataError):
    pass


class NotFitted(CmlidError, RuntimeError):
    exit_code = 5


class ModelFileError(CmlidError):
    exit_code = 4


class NumericalError(CmlidError, ArithmeticError):
    exit_code = 5


class NonPositiveAlpha(ConfigError):
    pass
