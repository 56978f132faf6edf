"""Exception taxonomy shared by the library and the CLI.

The CLI maps each branch of this hierarchy to a distinct exit code
(see ``phraserank.cli``), so errors must stay typed all the way up:
parsing problems raise ConlluParseError, dataset/prediction-file
problems raise DatasetError, and embedding-backend problems raise a
BackendError subclass.
"""


class PhraseRankError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PhraseRankError):
    """Invalid configuration: bad flag value, malformed config file, ..."""


class ConlluParseError(PhraseRankError):
    """Malformed CoNLL-U input."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class DatasetError(PhraseRankError):
    """Malformed dataset or prediction file, or inconsistent document ids."""


class BackendError(PhraseRankError):
    """Embedding backend failure."""


class TransportError(BackendError):
    """The embedding service could not be reached after bounded retries."""


class ContractViolationError(BackendError):
    """The embedding service answered, but the response violates the protocol."""
