"""Exception types raised across the toolkit."""


class StereobenchError(Exception):
    """Base class for all toolkit errors."""


class DatasetError(StereobenchError):
    """Base class for dataset loading/validation failures."""


class MissingCalibration(DatasetError):
    pass


class MalformedLabel(DatasetError):
    pass


class EpipolarViolation(DatasetError):
    pass


class NonIncreasingAnchors(DatasetError):
    pass


class SchemaMismatch(DatasetError):
    pass


class GeometryError(StereobenchError):
    pass


class NonPositiveDisparity(GeometryError):
    pass


class BehindCamera(GeometryError):
    pass


class CameraInsideSphere(GeometryError):
    pass


class AggregationError(StereobenchError):
    pass


class EmptyInput(AggregationError):
    pass


class TooFewVideos(AggregationError):
    pass


class EmptyWindow(AggregationError):
    pass


class AllZeroWeights(AggregationError):
    pass


class HarnessError(StereobenchError):
    pass


class ProtocolViolation(HarnessError):
    pass


class TemplateOutOfBounds(HarnessError):
    pass


class NoValidFrames(StereobenchError):
    pass
