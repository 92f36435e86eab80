"""Exception types for the extraction pipeline."""


class ExtractorError(Exception):
    """Base class for everything this package raises on purpose."""


class ModelLoadError(ExtractorError):
    """A pretrained model could not be imported or loaded."""


class NoObjectsDetected(ExtractorError):
    """No detection cleared the confidence threshold.

    The pipeline still writes the bundle (with an empty object list, so it
    fails validation downstream) and issues a UserWarning before raising;
    the written path is available as .bundle_path.
    """

    def __init__(self, message: str, bundle_path=None):
        super().__init__(message)
        self.bundle_path = bundle_path
