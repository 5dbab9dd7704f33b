"""Exception types shared across the package.

Every error raised on purpose derives from StegoStreamError so callers
(and the CLI exit-code mapping) can catch one base class.
"""


class StegoStreamError(Exception):
    """Base class for all stegostream errors."""


# -- container ---------------------------------------------------------------

class MalformedRiff(StegoStreamError):
    """RIFF/WAVE structure is broken: truncated chunk, missing fmt/data, ..."""


class UnknownFormat(StegoStreamError):
    """Input is not a WAV and no raw header override was given."""


class HeaderExceedsFile(StegoStreamError):
    """Raw header override does not leave any body bytes."""


class UnsupportedDepth(StegoStreamError):
    """Sample decoding requested for a depth other than 16-bit PCM."""


# -- cipher ------------------------------------------------------------------

class EmptyPassphrase(StegoStreamError):
    """Passphrase must be non-empty."""


class EmptyMessage(StegoStreamError):
    """Messages of zero length cannot be sealed."""


class MessageTooLarge(StegoStreamError):
    """Message length does not fit the 32-bit size field."""


# -- stego -------------------------------------------------------------------

class CapacityExceeded(StegoStreamError):
    """Carrier is too small for the requested embed; reports required vs available."""


class CarrierTooSmall(StegoStreamError):
    """Carrier cannot even hold the metadata block of the flagged mode."""


class SizeImplausible(StegoStreamError):
    """Declared message size exceeds what the carrier could hold; no valid message."""


# -- quality -----------------------------------------------------------------

class LengthMismatch(StegoStreamError):
    """Compared sequences must have equal length."""


class TooShort(StegoStreamError):
    """Input does not contain a single usable analysis frame."""


class EmptyInput(StegoStreamError):
    """Waveform comparison needs non-empty signals."""


# -- transfer ----------------------------------------------------------------

class ConnectFailed(StegoStreamError):
    """Could not open a connection to the receiver."""


class RemoteRejected(StegoStreamError):
    """Receiver answered with a rejection acknowledgment."""


class TransferIoError(StegoStreamError):
    """Connection died mid-transfer (short read/write, missing ack)."""


class BindFailed(StegoStreamError):
    """Receiver could not bind its listening port."""
