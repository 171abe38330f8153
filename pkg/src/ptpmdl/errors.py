"""Exception hierarchy shared by all ptpmdl modules."""


class PtpmdlError(Exception):
    """Base class for every error raised by this package."""


class ContainerError(PtpmdlError):
    pass


class BadMagic(ContainerError):
    pass


class BadVersion(ContainerError):
    pass


class Truncated(ContainerError):
    pass


class InconsistentOffsets(ContainerError):
    pass


class BlockTooShort(PtpmdlError):
    pass


class DepthMismatch(PtpmdlError):
    pass


class MalformedStructure(PtpmdlError):
    pass


class BitstreamUnderrun(PtpmdlError):
    pass


class EmptyInput(PtpmdlError):
    pass


class BlockOutOfRange(PtpmdlError):
    pass


class ImproperStateSet(PtpmdlError):
    pass
