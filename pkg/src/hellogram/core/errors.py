"""
Error types shared across hellogram modules.

Every operational failure raised by the library derives from HellogramError and
carries a stable code from ErrorCodes, so the CLI can report it uniformly.
"""

from typing import Any, Dict, Optional


class ErrorCodes:
    """
    Error codes used across modules.

    Use these constants instead of hardcoding error strings.
    """

    # Wire format
    TRUNCATED_MESSAGE = "TRUNCATED_MESSAGE"
    NOT_CLIENT_HELLO = "NOT_CLIENT_HELLO"
    MALFORMED_LENGTH = "MALFORMED_LENGTH"
    INVALID_HEX_DIGIT = "INVALID_HEX_DIGIT"
    ODD_DIGIT_COUNT = "ODD_DIGIT_COUNT"
    LABEL_CONFLICT = "LABEL_CONFLICT"

    # Repository
    MALFORMED_REPOSITORY_LINE = "MALFORMED_REPOSITORY_LINE"

    # Models
    LABEL_MISMATCH = "LABEL_MISMATCH"
    EMPTY_CORPUS = "EMPTY_CORPUS"
    SCHEMA_VERSION_MISMATCH = "SCHEMA_VERSION_MISMATCH"
    CORRUPT_MODEL_FILE = "CORRUPT_MODEL_FILE"

    # Inference
    NO_MODELS = "NO_MODELS"
    EMPTY_INPUT = "EMPTY_INPUT"

    # Perturbation
    LIST_TOO_SHORT = "LIST_TOO_SHORT"

    # Evaluation
    LENGTH_MISMATCH = "LENGTH_MISMATCH"
    EMPTY_CLASS_SET = "EMPTY_CLASS_SET"
    INSUFFICIENT_SPLITS = "INSUFFICIENT_SPLITS"
    NO_LABELED_DATA = "NO_LABELED_DATA"

    # Ingest
    INVALID_PROFILE = "INVALID_PROFILE"
    NOT_PCAP = "NOT_PCAP"
    NOT_TEXT = "NOT_TEXT"


class HellogramError(Exception):
    """Base class for operational errors raised by hellogram."""

    code: str = "HELLOGRAM_ERROR"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Serialize for diagnostics."""
        result: Dict[str, Any] = {"code": self.code, "message": self.message}
        if self.details:
            result["details"] = self.details
        return result


# ==========================================
# Wire format
# ==========================================


class ParseError(HellogramError):
    """A ClientHello could not be decoded."""

    code = "PARSE_ERROR"


class TruncatedMessage(ParseError):
    """A length field points past the available bytes."""

    code = ErrorCodes.TRUNCATED_MESSAGE


class NotClientHello(ParseError):
    """The record or handshake type is not a ClientHello."""

    code = ErrorCodes.NOT_CLIENT_HELLO


class MalformedLength(ParseError):
    """Inner lengths disagree with the enclosing length."""

    code = ErrorCodes.MALFORMED_LENGTH


class InvalidHexDigit(HellogramError):
    code = ErrorCodes.INVALID_HEX_DIGIT


class OddDigitCount(HellogramError):
    code = ErrorCodes.ODD_DIGIT_COUNT


class LabelConflict(HellogramError):
    """Identical byte sequences carry different labels."""

    code = ErrorCodes.LABEL_CONFLICT


# ==========================================
# Repository and models
# ==========================================


class MalformedRepositoryLine(HellogramError):
    code = ErrorCodes.MALFORMED_REPOSITORY_LINE


class LabelMismatch(HellogramError):
    code = ErrorCodes.LABEL_MISMATCH


class EmptyCorpus(HellogramError):
    code = ErrorCodes.EMPTY_CORPUS


class SchemaVersionMismatch(HellogramError):
    code = ErrorCodes.SCHEMA_VERSION_MISMATCH


class CorruptModelFile(HellogramError):
    code = ErrorCodes.CORRUPT_MODEL_FILE


# ==========================================
# Inference and perturbation
# ==========================================


class NoModels(HellogramError):
    code = ErrorCodes.NO_MODELS


class EmptyInput(HellogramError):
    code = ErrorCodes.EMPTY_INPUT


class ListTooShort(HellogramError):
    """The cipher suite list offers no position to perturb."""

    code = ErrorCodes.LIST_TOO_SHORT


# ==========================================
# Evaluation
# ==========================================


class LengthMismatch(HellogramError):
    code = ErrorCodes.LENGTH_MISMATCH


class EmptyClassSet(HellogramError):
    code = ErrorCodes.EMPTY_CLASS_SET


class InsufficientSplits(HellogramError):
    code = ErrorCodes.INSUFFICIENT_SPLITS


class NoLabeledData(HellogramError):
    code = ErrorCodes.NO_LABELED_DATA


# ==========================================
# Ingest
# ==========================================


class InvalidProfile(HellogramError):
    code = ErrorCodes.INVALID_PROFILE


class NotPcap(HellogramError):
    code = ErrorCodes.NOT_PCAP


class NotText(HellogramError):
    """A text input (hex-line corpus, repository, profile) is not valid UTF-8."""

    code = ErrorCodes.NOT_TEXT


__all__ = [
    "ErrorCodes",
    "HellogramError",
    "ParseError",
    "TruncatedMessage",
    "NotClientHello",
    "MalformedLength",
    "InvalidHexDigit",
    "OddDigitCount",
    "LabelConflict",
    "MalformedRepositoryLine",
    "LabelMismatch",
    "EmptyCorpus",
    "SchemaVersionMismatch",
    "CorruptModelFile",
    "NoModels",
    "EmptyInput",
    "ListTooShort",
    "LengthMismatch",
    "EmptyClassSet",
    "InsufficientSplits",
    "NoLabeledData",
    "InvalidProfile",
    "NotPcap",
    "NotText",
]
