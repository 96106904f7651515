"""Error hierarchy shared by every module.

Each error carries a stable machine-readable ``code`` string; the HTTP
layer maps codes to status codes and echoes the code in 4xx/5xx bodies.
"""


class LagodrError(Exception):
    code = "InternalError"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class InvalidRecord(LagodrError):
    code = "InvalidRecord"


class ValidationFailed(LagodrError):
    code = "ValidationFailed"

    def __init__(self, report, message: str = "record failed validation"):
        super().__init__(message)
        self.report = report


class DuplicateSlug(LagodrError):
    code = "DuplicateSlug"


class BadParentKind(LagodrError):
    code = "BadParentKind"


class UnknownNode(LagodrError):
    code = "UnknownNode"


class UnknownPid(LagodrError):
    code = "UnknownPid"


class AlreadyWithdrawn(LagodrError):
    code = "AlreadyWithdrawn"


class WithdrawnItem(LagodrError):
    code = "WithdrawnItem"


class StorageFailure(LagodrError):
    code = "StorageFailure"


class UnknownAddress(LagodrError):
    code = "UnknownAddress"


class ChecksumMismatch(LagodrError):
    code = "ChecksumMismatch"


class Unauthorized(LagodrError):
    code = "Unauthorized"


class Forbidden(LagodrError):
    code = "Forbidden"


class Unreadable(LagodrError):
    code = "Unreadable"


class UnknownCriterion(LagodrError):
    code = "UnknownCriterion"


class UnknownSet(LagodrError):
    code = "UnknownSet"


class InvalidEmail(LagodrError):
    code = "InvalidEmail"


class BadInterval(LagodrError):
    code = "BadInterval"


class DuplicatePeer(LagodrError):
    code = "DuplicatePeer"


class UnknownPeer(LagodrError):
    code = "UnknownPeer"


class PeerUnreachable(LagodrError):
    code = "PeerUnreachable"


class ProtocolError(LagodrError):
    code = "ProtocolError"

    def __init__(self, message: str = "", page: int | None = None):
        super().__init__(message)
        self.page = page


class BadToken(LagodrError):
    code = "BadToken"
