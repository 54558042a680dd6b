class QrError(Exception):
    """Base for all QR encode/decode failures."""


class DoesNotFit(QrError):
    """No version satisfies both the capacity and the pixel budget."""


class CapacityExceeded(QrError):
    pass


class InvalidCharacterForMode(QrError):
    pass


class CodewordCountMismatch(QrError):
    pass


class UnsupportedVersion(QrError):
    pass


class FormatInfoUnrecoverable(QrError):
    pass


class EccFailure(QrError):
    """More corrupt codewords than the Reed-Solomon block can repair."""


class MalformedSegments(QrError):
    pass
