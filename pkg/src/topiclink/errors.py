"""Exception types shared across the toolkit."""


class TopicLinkError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(TopicLinkError, ValueError):
    """An argument is malformed or out of its documented range."""


class DataError(TopicLinkError, ValueError):
    """The input data is structurally valid but unusable for the operation
    (e.g. an all-zero matrix, a fully-unknown masked matrix)."""


class SchemaError(TopicLinkError):
    """A stored artifact declares an unsupported schema version."""


class ChecksumError(TopicLinkError):
    """A stored artifact's bytes do not match its recorded checksum."""


class DependencyError(TopicLinkError):
    """A pipeline stage was invoked before the artifact it consumes exists."""


class BundleLockedError(TopicLinkError):
    """Another invocation holds the bundle's advisory write lock."""
