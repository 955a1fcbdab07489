"""Exception types raised across the package."""


class EpgifError(Exception):
    """Base class for package errors."""


class ParameterError(EpgifError, ValueError):
    """A numeric parameter is outside its valid range."""


class ShapeError(EpgifError, ValueError):
    """Input planes or frames have incompatible dimensions."""


class ImageFormatError(EpgifError, ValueError):
    """Unsupported file format, bit depth, or channel layout."""


class RangeError(EpgifError, ValueError):
    """Sample value outside [0, L] where clamping was not requested."""
