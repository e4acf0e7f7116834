"""Exception hierarchy shared by the pipeline stages."""


class StyleDefectError(Exception):
    """Base class for every error raised by this package."""


class IngestionError(StyleDefectError):
    """A repository or commit archive could not be read."""


class ArchiveValidationError(IngestionError):
    """A commit archive violates a graph invariant (dangling parent, cycle, ...)."""

    def __init__(self, message, commit_id=None):
        super().__init__(message)
        self.commit_id = commit_id


class SnapshotError(StyleDefectError):
    """The file tree at a commit cannot be reconstructed."""


class SchemaError(StyleDefectError):
    """A CSV/JSON artifact does not match the expected layout."""

    def __init__(self, message, column=None, line=None):
        super().__init__(message)
        self.column = column
        self.line = line


class JoinError(StyleDefectError):
    """Labels and feature vectors disagree on the set of files."""

    def __init__(self, message, missing_features=(), missing_labels=()):
        super().__init__(message)
        self.missing_features = list(missing_features)
        self.missing_labels = list(missing_labels)


class PreprocessError(StyleDefectError):
    """Scaling, VIF filtering or SMOTE received unusable input."""


class TrainingError(StyleDefectError):
    """A classifier cannot be fit or applied."""


class PipelineError(StyleDefectError):
    """An experiment plan failed; the message names the plan."""


class ConfigError(StyleDefectError):
    """Invalid or missing configuration."""
