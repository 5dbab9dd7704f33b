"""Distortion and fidelity metrics for carrier/stego pairs.

Segmental SNR averages per-frame ``10*log10(signal / distortion)`` over
fixed-length frames; cross-correlation and bit-plane diffs back up the
"did anything audible or structural change" checks. Stereo input is
treated as one interleaved stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, LengthMismatch, TooShort

SNR_CAP_DB = 100.0
DEFAULT_FRAME_MS = 10


@dataclass(frozen=True)
class QualityReport:
    seg_snr_db: float
    frames_used: int
    xcorr_peak: float
    xcorr_lag: int
    modified_bytes_plane0: int
    modified_bytes_plane1: int

    def lines(self) -> list[str]:
        """key=value lines, one per field."""
        return [
            f"seg_snr_db={self.seg_snr_db:.6f}",
            f"frames_used={self.frames_used}",
            f"xcorr_peak={self.xcorr_peak:.9f}",
            f"xcorr_lag={self.xcorr_lag}",
            f"modified_bytes_plane0={self.modified_bytes_plane0}",
            f"modified_bytes_plane1={self.modified_bytes_plane1}",
        ]


def default_frame_len(sample_rate: int, frame_ms: int = DEFAULT_FRAME_MS) -> int:
    """Frame length in samples for a frame duration in milliseconds."""
    return max(1, sample_rate * frame_ms // 1000)


def frame_snrs(original, modified, frame_len: int) -> list[float]:
    """Per-frame SNR values in dB, capped at SNR_CAP_DB.

    Frames with zero signal energy are skipped; frames with zero
    distortion contribute the cap value. Trailing samples that do not
    fill a frame are ignored.
    """
    a = np.asarray(original, dtype=np.float64)
    b = np.asarray(modified, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"sample counts differ: {a.size} vs {b.size}")
    if frame_len < 1:
        raise TooShort("frame length must be >= 1")
    frame_count = a.size // frame_len
    if frame_count == 0:
        raise TooShort(f"need at least {frame_len} samples, got {a.size}")
    n = frame_count * frame_len
    signal = (a[:n].reshape(frame_count, frame_len) ** 2).sum(axis=1)
    distortion = ((a[:n] - b[:n]).reshape(frame_count, frame_len) ** 2).sum(axis=1)
    values = []
    for sig, dist in zip(signal, distortion):
        if sig == 0.0:
            continue
        if dist == 0.0:
            values.append(SNR_CAP_DB)
        else:
            values.append(min(10.0 * math.log10(sig / dist), SNR_CAP_DB))
    return values


def segmental_snr(original, modified, frame_len: int) -> float:
    """Mean per-frame SNR in dB over all frames with signal energy."""
    values = frame_snrs(original, modified, frame_len)
    if not values:
        raise TooShort("no frame has signal energy")
    return sum(values) / len(values)


def waveform_compare(a, b, max_lag: int) -> tuple[float, int]:
    """Peak normalized cross-correlation within |lag| <= max_lag.

    r(lag) = sum(a[t] * b[t+lag]) / sqrt(sum(a^2) * sum(b^2)) over the
    overlap. Ties prefer the smaller |lag|, then the negative one. Zero
    total energy on either side yields (0.0, 0).
    """
    xs = np.asarray(a, dtype=np.float64)
    ys = np.asarray(b, dtype=np.float64)
    if xs.size == 0 or ys.size == 0:
        raise EmptyInput("waveform comparison needs non-empty signals")
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    denom = math.sqrt(float((xs * xs).sum()) * float((ys * ys).sum()))
    if denom == 0.0:
        return 0.0, 0
    best_r = -math.inf
    best_lag = 0
    for lag in range(-max_lag, max_lag + 1):
        if lag >= 0:
            n = min(xs.size, ys.size - lag)
            r = float(np.dot(xs[:n], ys[lag : lag + n])) / denom if n > 0 else 0.0
        else:
            n = min(xs.size + lag, ys.size)
            r = float(np.dot(xs[-lag : -lag + n], ys[:n])) / denom if n > 0 else 0.0
        if r > best_r or (
            r == best_r and (abs(lag) < abs(best_lag) or (abs(lag) == abs(best_lag) and lag < best_lag))
        ):
            best_r = r
            best_lag = lag
    return best_r, best_lag


def bitplane_diff(before: bytes, after: bytes) -> tuple[int, int, int]:
    """Count bytes changed in plane 0, plane 1, and any higher plane."""
    if len(before) != len(after):
        raise LengthMismatch(f"byte counts differ: {len(before)} vs {len(after)}")
    delta = np.frombuffer(bytes(before), dtype=np.uint8) ^ np.frombuffer(bytes(after), dtype=np.uint8)
    plane0 = int(np.count_nonzero(delta & 0x01))
    plane1 = int(np.count_nonzero(delta & 0x02))
    other = int(np.count_nonzero(delta & 0xFC))
    return plane0, plane1, other
