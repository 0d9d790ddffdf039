"""Exception types shared by the detection pipeline."""


class VogError(Exception):
    """Base class for all errors raised by vogtrack."""


class PgmFormatError(VogError):
    """Malformed or unsupported PGM data."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class DimensionError(VogError, ValueError):
    pass


class DegenerateConfiguration(VogError, ValueError):
    pass


class InsufficientPoints(VogError, ValueError):
    pass


class DetectionFailure(VogError):
    """A frame in which the detector refuses to report a result.

    ``code`` is a stable machine-readable identifier (used in CSV status
    columns); ``str(exc)`` is the human-readable reason.
    """

    def __init__(self, code, message=None):
        super().__init__(message or code.replace("_", " "))
        self.code = code


# failure codes
EYE_AREA_NOT_FOUND = "eye_area_not_found"
IRIS_NOT_FOUND = "iris_not_found"
INSUFFICIENT_SAMPLES = "insufficient_samples"
INSUFFICIENT_AFTER_REMOVAL = "insufficient_samples_after_outlier_removal"
CORNER_NOT_FOUND = "corner_not_found"
