"""Exception hierarchy for the segmentation engine."""


class LbpSegError(ValueError):
    """Base class for all errors raised by lbpseg."""


class ChannelMismatchError(LbpSegError):
    pass


class ParameterError(LbpSegError):
    pass


class SizeError(LbpSegError):
    pass


class RangeError(LbpSegError):
    pass


class DegenerateError(LbpSegError):
    """Input carries no usable structure (flat map, identical points, empty GT...).

    The batch harness treats any subclass as "unsegmentable" for that image.
    """


class DegenerateVarianceError(DegenerateError):
    pass


class DegenerateDataError(DegenerateError):
    pass


class DegenerateReferenceError(DegenerateError):
    pass


class DegenerateGTError(DegenerateError):
    pass


class DegenerateMaskError(DegenerateError):
    pass


class EmptyMaskError(DegenerateError):
    pass


class InsufficientDataError(LbpSegError):
    pass


class UndefinedCVError(LbpSegError):
    pass


class ManifestError(LbpSegError):
    pass


class RunError(LbpSegError):
    pass


class UnsegmentableError(DegenerateError):
    """The pipeline could not produce a mask for this image."""
