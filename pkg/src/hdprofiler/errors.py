"""Exception taxonomy shared by all hdprofiler modules."""


class ProfilerError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(ProfilerError):
    """Two vectors (or a vector and a database) disagree on bit length."""


class EmptyBundleError(ProfilerError):
    """Majority binarization requested on an accumulator with no vectors."""


class WindowError(ProfilerError):
    """An n-gram window has the wrong length."""


class AmbiguousSymbolError(ProfilerError):
    """A window contains a symbol outside the configured alphabet."""


class TooShortError(ProfilerError):
    """A sequence contains no valid encoding window."""


class EmptyReferenceError(ProfilerError):
    """A whole reference genome produced no valid encoding window."""


class DuplicateTaxonError(ProfilerError):
    """Two reference records collide on their taxon identity."""


class ConfigFormatError(ProfilerError):
    """A configuration file is malformed, truncated, or version-mismatched."""


class ConfigMismatchError(ProfilerError):
    """Artifacts built under different HD-space configurations were mixed."""


class DbFormatError(ProfilerError):
    """A reference-database file is corrupt or has the wrong format/version."""


class IoError(ProfilerError):
    """An input path could not be opened or read."""


class ParseError(ProfilerError):
    """A sequence or table file violates its format.

    Carries the offending location when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:" if line is None else f"{path}:{line}: "
        super().__init__(f"{prefix}{message}")


class TaxonMappingError(ProfilerError):
    """A truth-table taxon cannot be resolved against the database."""


class InternalConsistencyError(ProfilerError):
    """A classification refers to a record index outside the database."""
