"""Two-tier bit-plane embedding of sealed payloads into audio carriers.

Two layouts are supported. Regular hides one bit per carrier byte (LSB
only) and reserves 41 bytes of metadata; Excessive hides two bits per
carrier byte (LSB plus the 7th bit, i.e. the second-least-significant)
and reserves 21, doubling capacity at the cost of more distortion. The
ciphertext is split into a head half (first ``ceil(m/2)`` bytes) and a
tail half that are written as two parallel bit streams.

Offsets below are relative to the protected header length ``h``; every
field and message byte is written MSB-first:

    Regular (flag LSB = 1)               Excessive (flag LSB = 0)
    h           flag bit                 h           flag bit
    h+1 ..h+8   type byte, LSBs          h+1 ..h+4   type nibbles, LSB/7th planes
    h+9 ..h+40  32-bit size, LSBs        h+5 ..h+20  size halves, LSB/7th planes
    h+41+2i     head bit i, LSB          h+21+i      head bit i in LSB,
    h+42+2j     tail bit j, LSB                      tail bit j in 7th bit

A carrier holds no marker that a message is present: inspecting a clean
file decodes noise, and implausible sizes are the only rejection signal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .cipher import MAX_MESSAGE_BYTES, SealedPayload, unseal
from .container import AudioCarrier
from .errors import CapacityExceeded, CarrierTooSmall, SizeImplausible

PLANE_LSB = 0
PLANE_SEVENTH = 1


def read_bit(value: int, plane: int) -> int:
    """Read the bit of `value` in the given plane (0 = LSB, 1 = 7th bit)."""
    _check_plane(plane)
    return (value >> plane) & 1


def write_bit(value: int, plane: int, bit: int) -> int:
    """Return `value` with the selected plane set to `bit`; other bits kept."""
    _check_plane(plane)
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    return (value & ~(1 << plane) | (bit << plane)) & 0xFF


def _check_plane(plane: int):
    if plane not in (PLANE_LSB, PLANE_SEVENTH):
        raise ValueError("plane must be 0 (LSB) or 1 (7th bit)")


class StegoMode(enum.Enum):
    """Embedding layout plus its per-mode constants.

    `head_byte_span` is how many carrier bytes one head-half message byte
    occupies (the matching tail byte rides inside the same span).
    """

    def __new__(cls, label, flag_bit, type_field_len, size_field_len, head_byte_span):
        obj = object.__new__(cls)
        obj._value_ = label
        obj.flag_bit = flag_bit
        obj.type_field_len = type_field_len
        obj.size_field_len = size_field_len
        obj.head_byte_span = head_byte_span
        return obj

    REGULAR = ("regular", 1, 8, 32, 16)
    EXCESSIVE = ("excessive", 0, 4, 16, 8)

    @property
    def reserved_bytes(self) -> int:
        return 1 + self.type_field_len + self.size_field_len

    @classmethod
    def from_flag(cls, bit: int) -> "StegoMode":
        return cls.REGULAR if bit == cls.REGULAR.flag_bit else cls.EXCESSIVE


# -- file-type registry -------------------------------------------------------

UNKNOWN_TYPE_CODE = 0x00
UNKNOWN_EXTENSION = "bin"

_code_to_extension = {
    0x00: "bin",
    0x01: "txt",
    0x02: "wav",
    0x03: "mp3",
    0x04: "png",
    0x05: "jpg",
    0x06: "pdf",
    0x07: "zip",
}
_extension_to_code = {ext: code for code, ext in _code_to_extension.items()}


def _normalize_extension(extension: str) -> str:
    return extension.lower().lstrip(".")


def register_file_type(code: int, extension: str):
    """Add a code <-> extension pair; both sides must be unused."""
    if not 0 <= code <= 0xFF:
        raise ValueError("file type code must fit one byte")
    ext = _normalize_extension(extension)
    if not ext:
        raise ValueError("extension must be non-empty")
    if code in _code_to_extension and _code_to_extension[code] != ext:
        raise ValueError(f"code {code:#04x} is already registered as {_code_to_extension[code]!r}")
    if ext in _extension_to_code and _extension_to_code[ext] != code:
        raise ValueError(f"extension {ext!r} is already registered as {_extension_to_code[ext]:#04x}")
    _code_to_extension[code] = ext
    _extension_to_code[ext] = code


def code_for_extension(extension: str) -> int:
    """Type code for a file extension; unregistered extensions map to 0x00."""
    return _extension_to_code.get(_normalize_extension(extension), UNKNOWN_TYPE_CODE)


def extension_for_code(code: int) -> str:
    """Extension for a type code; unregistered codes map to "bin"."""
    return _code_to_extension.get(code, UNKNOWN_EXTENSION)


# -- layout planning ----------------------------------------------------------

@dataclass(frozen=True)
class EmbedPlan:
    """Resolved byte offsets for one embed of `message_len` ciphertext bytes."""

    mode: StegoMode
    flag_offset: int
    type_field_range: range
    size_field_range: range
    payload_base: int
    message_len: int
    head_len: int
    tail_len: int
    required_size: int

    @property
    def payload_span(self) -> int:
        """Carrier bytes covered by the payload region, full strides."""
        return self.mode.head_byte_span * self.head_len

    @property
    def tail_plane(self) -> int:
        return PLANE_LSB if self.mode is StegoMode.REGULAR else PLANE_SEVENTH

    def type_slots(self) -> list[tuple[int, int]]:
        """(offset, plane) per type-byte bit, MSB first."""
        return _field_slots(self.type_field_range, self.mode)

    def size_slots(self) -> list[tuple[int, int]]:
        """(offset, plane) per size-field bit, MSB first."""
        return _field_slots(self.size_field_range, self.mode)

    def head_offsets(self) -> np.ndarray:
        bit_count = 8 * self.head_len
        if self.mode is StegoMode.REGULAR:
            return self.payload_base + 2 * np.arange(bit_count, dtype=np.intp)
        return self.payload_base + np.arange(bit_count, dtype=np.intp)

    def tail_offsets(self) -> np.ndarray:
        bit_count = 8 * self.tail_len
        if self.mode is StegoMode.REGULAR:
            return self.payload_base + 1 + 2 * np.arange(bit_count, dtype=np.intp)
        return self.payload_base + np.arange(bit_count, dtype=np.intp)


def _field_slots(field_range: range, mode: StegoMode) -> list[tuple[int, int]]:
    slots = [(offset, PLANE_LSB) for offset in field_range]
    if mode is StegoMode.EXCESSIVE:
        slots += [(offset, PLANE_SEVENTH) for offset in field_range]
    return slots


def plan_embed(header_len: int, message_len: int, mode: StegoMode) -> EmbedPlan:
    """Lay out flag, type field, size field and payload for a message."""
    if header_len < 0:
        raise ValueError("header length must be >= 0")
    if message_len < 0:
        raise ValueError("message length must be >= 0")
    head_len = (message_len + 1) // 2
    tail_len = message_len // 2
    type_start = header_len + 1
    size_start = type_start + mode.type_field_len
    payload_base = size_start + mode.size_field_len
    return EmbedPlan(
        mode=mode,
        flag_offset=header_len,
        type_field_range=range(type_start, size_start),
        size_field_range=range(size_start, payload_base),
        payload_base=payload_base,
        message_len=message_len,
        head_len=head_len,
        tail_len=tail_len,
        required_size=payload_base + mode.head_byte_span * head_len,
    )


def required_size(header_len: int, message_len: int, mode: StegoMode) -> int:
    """Minimum carrier byte count for a message of `message_len` bytes."""
    return plan_embed(header_len, message_len, mode).required_size


def capacity(carrier: AudioCarrier, mode: StegoMode) -> int:
    """Largest message byte count the carrier can hold in the given mode."""
    room = carrier.body_end - carrier.header_len - mode.reserved_bytes
    if room < mode.head_byte_span:
        return 0
    return min(2 * (room // mode.head_byte_span), MAX_MESSAGE_BYTES)


# -- bit stream plumbing ------------------------------------------------------

def _write_field(buf: bytearray, slots: list[tuple[int, int]], value: int, width: int):
    for i, (offset, plane) in enumerate(slots):
        bit = (value >> (width - 1 - i)) & 1
        buf[offset] = write_bit(buf[offset], plane, bit)


def _read_field(data: bytes, slots: list[tuple[int, int]]) -> int:
    value = 0
    for offset, plane in slots:
        value = (value << 1) | read_bit(data[offset], plane)
    return value


def _write_stream(arr: np.ndarray, offsets: np.ndarray, plane: int, chunk: bytes):
    if not chunk:
        return
    bits = np.unpackbits(np.frombuffer(chunk, dtype=np.uint8))
    keep = np.uint8(0xFF ^ (1 << plane))
    arr[offsets] = (arr[offsets] & keep) | (bits << plane).astype(np.uint8)


def _read_stream(arr: np.ndarray, offsets: np.ndarray, plane: int) -> bytes:
    if offsets.size == 0:
        return b""
    bits = (arr[offsets] >> plane) & 1
    return np.packbits(bits).tobytes()


# -- operations ---------------------------------------------------------------

def embed(carrier: AudioCarrier, payload: SealedPayload, mode: StegoMode) -> AudioCarrier:
    """Write a sealed payload into a copy of the carrier.

    Only the selected bit planes of body bytes change; the header region
    and every other bit plane are untouched.
    """
    plan = plan_embed(carrier.header_len, payload.declared_size, mode)
    available = carrier.body_end
    if plan.required_size > available:
        raise CapacityExceeded(
            f"carrier size is not enough: {mode.value} embed of "
            f"{payload.declared_size} bytes needs {plan.required_size} carrier "
            f"bytes, only {available} usable"
        )
    buf = bytearray(carrier.data)
    arr = np.frombuffer(buf, dtype=np.uint8)
    buf[plan.flag_offset] = write_bit(buf[plan.flag_offset], PLANE_LSB, mode.flag_bit)
    _write_field(buf, plan.type_slots(), payload.file_type_code, 8)
    _write_field(buf, plan.size_slots(), payload.declared_size, 32)
    head = payload.ciphertext[: plan.head_len]
    tail = payload.ciphertext[plan.head_len :]
    _write_stream(arr, plan.head_offsets(), PLANE_LSB, head)
    _write_stream(arr, plan.tail_offsets(), plan.tail_plane, tail)
    return carrier.with_data(bytes(buf))


def inspect_carrier(carrier: AudioCarrier) -> tuple[StegoMode, int, int]:
    """Decode (mode, file type code, declared size) from the metadata block.

    Presence is not authenticated: a carrier without a message decodes to
    an arbitrary triple.
    """
    limit = carrier.body_end
    h = carrier.header_len
    if limit < h + 1:
        raise CarrierTooSmall("carrier has no room for the mode flag")
    mode = StegoMode.from_flag(read_bit(carrier.data[h], PLANE_LSB))
    if limit < h + mode.reserved_bytes:
        raise CarrierTooSmall(
            f"carrier ends inside the {mode.value} metadata block "
            f"({limit - h} bytes past header, {mode.reserved_bytes} needed)"
        )
    plan = plan_embed(h, 0, mode)
    type_code = _read_field(carrier.data, plan.type_slots())
    declared = _read_field(carrier.data, plan.size_slots())
    return mode, type_code, declared


def extract(carrier: AudioCarrier, passphrase: str) -> tuple[bytes, str]:
    """Recover (plaintext, extension) from an embedded carrier.

    A wrong passphrase produces garbage plaintext, not an error.
    """
    mode, type_code, declared = inspect_carrier(carrier)
    if declared < 1 or required_size(carrier.header_len, declared, mode) > carrier.body_end:
        raise SizeImplausible(
            f"declared size {declared} does not fit this carrier; no valid message"
        )
    plan = plan_embed(carrier.header_len, declared, mode)
    arr = np.frombuffer(carrier.data, dtype=np.uint8)
    head = _read_stream(arr, plan.head_offsets(), PLANE_LSB)
    tail = _read_stream(arr, plan.tail_offsets(), plan.tail_plane)
    payload = SealedPayload(head + tail, type_code, declared)
    return unseal(payload, passphrase), extension_for_code(type_code)


def delete_message(carrier: AudioCarrier, passphrase: str = "") -> AudioCarrier:
    """Blank an embedded message in a copy of the carrier.

    Zeroes the LSBs of the size field and of the payload span, then clears
    the flag bit. 7th-bit planes are left alone to avoid extra noise, and
    the type field is kept, so deletion leaves recoverable residue in
    Excessive mode by design. The passphrase is accepted for interface
    parity only; nothing verifies it.
    """
    mode, _, declared = inspect_carrier(carrier)
    if required_size(carrier.header_len, declared, mode) > carrier.body_end:
        raise SizeImplausible(
            f"declared size {declared} does not fit this carrier; nothing to delete"
        )
    plan = plan_embed(carrier.header_len, declared, mode)
    buf = bytearray(carrier.data)
    arr = np.frombuffer(buf, dtype=np.uint8)
    _zero_lsb(arr, plan.size_field_range.start, plan.size_field_range.stop)
    _zero_lsb(arr, plan.payload_base, plan.payload_base + plan.payload_span)
    buf[plan.flag_offset] = write_bit(buf[plan.flag_offset], PLANE_LSB, 0)
    return carrier.with_data(bytes(buf))


def _zero_lsb(arr: np.ndarray, start: int, stop: int):
    stop = min(stop, arr.size)  # ranges are clamped to the file end
    if start < stop:
        arr[start:stop] &= 0xFE
