"""Exception and warning types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all errors raised by ddacf-kit."""


class MalformedRecord(ToolkitError):
    """A corpus line could not be parsed or failed validation."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateUser(ToolkitError):
    """The same user_id appeared more than once in a corpus file."""

    def __init__(self, user_id: str):
        super().__init__(f"duplicate user_id {user_id!r}")
        self.user_id = user_id


class EmptyCorpus(ToolkitError):
    """No valid user records remain."""


class InvalidDistribution(ToolkitError):
    """Probability vector has negative mass or does not sum to one."""


class EmptyVocab(ToolkitError):
    """A vocabulary restriction left no terms to work with."""


class SchemaMismatch(ToolkitError):
    """Feature schema fingerprints disagree, or component user orders differ."""


class SingleClass(ToolkitError):
    """Training data contains only one class."""


class NonConvergence(ToolkitError):
    """Iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, iterations: int, cap: int):
        super().__init__(f"no convergence after {iterations} iterations (cap {cap})")
        self.iterations = iterations
        self.cap = cap


class LengthMismatch(ToolkitError):
    """Paired sequences have different lengths."""


class OneClassOnly(ToolkitError):
    """ROC requires at least one positive and one negative example."""


class TooFewExamples(ToolkitError):
    """Not enough examples per class for the requested operation."""


class InvalidParams(ToolkitError):
    """Generator or experiment parameters fail validation."""


class DegenerateQuartiles(UserWarning):
    """Quartile cut points collapsed (constant field); all codes default to 0."""
