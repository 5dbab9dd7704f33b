"""Audio steganography toolkit: encrypted embed/extract/delete, quality
metrics, and LAN transfer of stego files."""

from .cipher import SealedPayload, derive_key_material, seal, unseal
from .container import AudioCarrier, CarrierKind, FormatInfo, parse_carrier, samples_16, serialize
from .errors import StegoStreamError
from .quality import QualityReport, bitplane_diff, segmental_snr, waveform_compare
from .stego import (
    EmbedPlan,
    StegoMode,
    capacity,
    code_for_extension,
    delete_message,
    embed,
    extension_for_code,
    extract,
    inspect_carrier,
    plan_embed,
    read_bit,
    register_file_type,
    required_size,
    write_bit,
)
from .transfer import FileReceiver, send_file, serve

__version__ = "0.1.0"

__all__ = [
    "AudioCarrier",
    "CarrierKind",
    "EmbedPlan",
    "FileReceiver",
    "FormatInfo",
    "QualityReport",
    "SealedPayload",
    "StegoMode",
    "StegoStreamError",
    "bitplane_diff",
    "capacity",
    "code_for_extension",
    "delete_message",
    "derive_key_material",
    "embed",
    "extension_for_code",
    "extract",
    "inspect_carrier",
    "parse_carrier",
    "plan_embed",
    "read_bit",
    "register_file_type",
    "required_size",
    "samples_16",
    "seal",
    "segmental_snr",
    "send_file",
    "serialize",
    "serve",
    "unseal",
    "waveform_compare",
    "write_bit",
]
