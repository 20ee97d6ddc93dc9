"""Exception types shared across the package."""


class DistortlabError(Exception):
    """Base class for all package errors."""


class ParseError(DistortlabError, ValueError):
    """Malformed vector literal or file.

    ``location`` is a human readable pointer (term index, JSON path, ...).
    """

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)


class CapExceededError(DistortlabError):
    """Input is larger than the configured cap of the chosen evaluator."""


class ValidationError(DistortlabError, ValueError):
    """A precondition on the input data does not hold."""


class CertificateError(DistortlabError, ValueError):
    """A certificate does not fit the vector it is supposed to certify."""
