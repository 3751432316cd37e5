"""Exception hierarchy shared by every stage of the pipeline."""


class AspherikaError(Exception):
    """Base class. ``stage`` is filled in by the case runner when known."""

    stage = None


class WordSyntaxError(AspherikaError, ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ConstraintConflict(AspherikaError, ValueError):
    pass


class EquationShapeError(AspherikaError, ValueError):
    pass


class PatternError(AspherikaError):
    pass


class NoMatch(PatternError):
    pass


class HypothesisViolated(PatternError):
    def __init__(self, message, occurrence):
        super().__init__(message)
        self.occurrence = occurrence


class ShapeViolated(PatternError):
    pass


class ConsistencyError(AspherikaError):
    pass


class RoundtripShapeError(AspherikaError, ValueError):
    pass


class FamilyShapeError(AspherikaError, ValueError):
    pass


class ClassResolutionError(AspherikaError):
    pass


class MissingWeightError(AspherikaError, LookupError):
    pass


class SearchExhausted(AspherikaError):
    def __init__(self, iterations):
        super().__init__(f"cutting-plane loop hit the iteration cap ({iterations})")
        self.iterations = iterations
