from .server import ERROR_CODES, METADATA_FORMATS, OAI_NS, OaiConfig, OaiServer
from .tokens import ResumptionToken, decode_token
from .conformance import validate_oai_dc_payload, validate_oai_response

__all__ = [
    "ERROR_CODES",
    "METADATA_FORMATS",
    "OAI_NS",
    "OaiConfig",
    "OaiServer",
    "ResumptionToken",
    "decode_token",
    "validate_oai_dc_payload",
    "validate_oai_response",
]
