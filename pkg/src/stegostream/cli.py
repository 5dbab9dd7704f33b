"""Command-line front end: embed, extract, delete, inspect, capacity,
snr, compare, send, recv.

Exit codes: 0 success, 1 usage, 2 capacity, 3 format, 4 network,
5 no valid message.
"""

from __future__ import annotations

import argparse
import getpass
import os
import sys
from pathlib import Path

from . import container, quality, stego, transfer
from .cipher import seal
from .errors import (
    BindFailed,
    CapacityExceeded,
    CarrierTooSmall,
    ConnectFailed,
    EmptyInput,
    EmptyPassphrase,
    HeaderExceedsFile,
    LengthMismatch,
    MalformedRiff,
    MessageTooLarge,
    RemoteRejected,
    SizeImplausible,
    StegoStreamError,
    TooShort,
    TransferIoError,
    UnknownFormat,
    UnsupportedDepth,
)

_EXIT_CODES = (
    ((CapacityExceeded, MessageTooLarge), 2),
    ((MalformedRiff, UnknownFormat, HeaderExceedsFile, UnsupportedDepth,
      LengthMismatch, TooShort, EmptyInput), 3),
    ((ConnectFailed, RemoteRejected, TransferIoError, BindFailed), 4),
    ((SizeImplausible, CarrierTooSmall), 5),
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this tool reserves 2 for capacity
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _exit_code_for(exc: StegoStreamError) -> int:
    for types, code in _EXIT_CODES:
        if isinstance(exc, types):
            return code
    return 1


def _passphrase(args) -> str:
    if getattr(args, "key_env", None):
        value = os.environ.get(args.key_env, "")
        if not value:
            raise EmptyPassphrase(f"environment variable {args.key_env} is unset or empty")
        return value
    return getpass.getpass("passphrase: ")


def _load_carrier(path, header_size) -> container.AudioCarrier:
    return container.parse_carrier(Path(path).read_bytes(), header_size)


def _choose_mode(carrier, message_len: int, requested: str | None) -> stego.StegoMode:
    if requested:
        return stego.StegoMode(requested)
    for mode in (stego.StegoMode.REGULAR, stego.StegoMode.EXCESSIVE):
        if stego.required_size(carrier.header_len, message_len, mode) <= carrier.body_end:
            return mode
    raise CapacityExceeded(
        f"message of {message_len} bytes fits neither mode: "
        f"regular capacity {stego.capacity(carrier, stego.StegoMode.REGULAR)} bytes, "
        f"excessive capacity {stego.capacity(carrier, stego.StegoMode.EXCESSIVE)} bytes"
    )


def _cmd_embed(args) -> int:
    carrier = _load_carrier(args.carrier, args.header_size)
    message_path = Path(args.message)
    message = message_path.read_bytes()
    mode = _choose_mode(carrier, len(message), args.mode)
    payload = seal(message, stego.code_for_extension(message_path.suffix), _passphrase(args))
    result = stego.embed(carrier, payload, mode)
    Path(args.out).write_bytes(container.serialize(result))
    print(f"mode={mode.value}")
    print(f"message_bytes={len(message)}")
    print(f"out={args.out}")
    return 0


def _cmd_extract(args) -> int:
    carrier = _load_carrier(args.carrier, args.header_size)
    plaintext, extension = stego.extract(carrier, _passphrase(args))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{Path(args.carrier).stem}.{extension}"
    out_path.write_bytes(plaintext)
    print(f"extension={extension}")
    print(f"message_bytes={len(plaintext)}")
    print(f"out={out_path}")
    return 0


def _cmd_delete(args) -> int:
    carrier = _load_carrier(args.carrier, args.header_size)
    # the passphrase is not verifiable; take it from the env when offered,
    # but never prompt for a value nothing will check
    key = os.environ.get(args.key_env, "") if args.key_env else ""
    result = stego.delete_message(carrier, key)
    Path(args.out).write_bytes(container.serialize(result))
    print(f"out={args.out}")
    return 0


def _cmd_inspect(args) -> int:
    carrier = _load_carrier(args.carrier, args.header_size)
    mode, type_code, declared = stego.inspect_carrier(carrier)
    plausible = (
        declared >= 1
        and stego.required_size(carrier.header_len, declared, mode) <= carrier.body_end
    )
    print(f"mode={mode.value}")
    print(f"file_type_code={type_code:#04x}")
    print(f"extension={stego.extension_for_code(type_code)}")
    print(f"declared_size={declared}")
    print(f"plausible={'yes' if plausible else 'no'}")
    return 0


def _cmd_capacity(args) -> int:
    carrier = _load_carrier(args.carrier, args.header_size)
    for mode in stego.StegoMode:
        print(f"{mode.value}_capacity_bytes={stego.capacity(carrier, mode)}")
    return 0


def _load_sample_pair(args):
    original = _load_carrier(args.original, None)
    modified = _load_carrier(args.stego, None)
    frame_len = quality.default_frame_len(original.format.sample_rate, args.frame_ms)
    return original, modified, frame_len


def _cmd_snr(args) -> int:
    original, modified, frame_len = _load_sample_pair(args)
    values = quality.frame_snrs(
        container.samples_16(original), container.samples_16(modified), frame_len
    )
    if not values:
        raise TooShort("no frame has signal energy")
    print(f"seg_snr_db={sum(values) / len(values):.6f}")
    print(f"frames_used={len(values)}")
    print(f"frame_len={frame_len}")
    return 0


def _cmd_compare(args) -> int:
    original, modified, frame_len = _load_sample_pair(args)
    samples_a = container.samples_16(original)
    samples_b = container.samples_16(modified)
    values = quality.frame_snrs(samples_a, samples_b, frame_len)
    if not values:
        raise TooShort("no frame has signal energy")
    peak, lag = quality.waveform_compare(samples_a, samples_b, args.max_lag)
    plane0, plane1, other = quality.bitplane_diff(original.data, modified.data)
    report = quality.QualityReport(
        seg_snr_db=sum(values) / len(values),
        frames_used=len(values),
        xcorr_peak=peak,
        xcorr_lag=lag,
        modified_bytes_plane0=plane0,
        modified_bytes_plane1=plane1,
    )
    for line in report.lines():
        print(line)
    print(f"modified_bytes_other_planes={other}")
    return 0


def _cmd_send(args) -> int:
    sent = transfer.send_file(args.host, args.port, args.file)
    print(f"bytes_sent={sent}")
    return 0


def _cmd_recv(args) -> int:
    receiver = transfer.FileReceiver(args.port, args.out)
    print(f"listening_port={receiver.port}")
    print(f"out_dir={args.out}")
    try:
        receiver.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        receiver.stop()
    return 0


def _add_header_size(parser):
    parser.add_argument("--header-size", type=int, default=None, metavar="N",
                        help="treat the carrier as raw bytes with N protected leading bytes")


def _add_key_env(parser):
    parser.add_argument("--key-env", metavar="VAR",
                        help="environment variable holding the passphrase (otherwise prompt)")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stegostream",
                     description="Hide encrypted files inside audio carriers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="hide a message file inside a carrier")
    p.add_argument("--carrier", required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=[m.value for m in stego.StegoMode],
                   help="embedding mode (default: regular when it fits, else excessive)")
    _add_key_env(p)
    _add_header_size(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("extract", help="recover a hidden message")
    p.add_argument("--carrier", required=True)
    p.add_argument("--out-dir", default=".")
    _add_key_env(p)
    _add_header_size(p)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("delete", help="blank a hidden message in place")
    p.add_argument("--carrier", required=True)
    p.add_argument("--out", required=True)
    _add_key_env(p)
    _add_header_size(p)
    p.set_defaults(func=_cmd_delete)

    p = sub.add_parser("inspect", help="decode embed metadata (no passphrase needed)")
    p.add_argument("carrier")
    _add_header_size(p)
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("capacity", help="print both modes' maximum message size")
    p.add_argument("carrier")
    _add_header_size(p)
    p.set_defaults(func=_cmd_capacity)

    p = sub.add_parser("snr", help="segmental SNR between two 16-bit PCM WAVs")
    p.add_argument("--original", required=True)
    p.add_argument("--stego", required=True)
    p.add_argument("--frame-ms", type=int, default=quality.DEFAULT_FRAME_MS)
    p.set_defaults(func=_cmd_snr)

    p = sub.add_parser("compare", help="full quality report between two WAVs")
    p.add_argument("--original", required=True)
    p.add_argument("--stego", required=True)
    p.add_argument("--frame-ms", type=int, default=quality.DEFAULT_FRAME_MS)
    p.add_argument("--max-lag", type=int, default=100)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("send", help="send a file to a receiver on the LAN")
    p.add_argument("--host", required=True)
    p.add_argument("--port", type=int, required=True)
    p.add_argument("file")
    p.set_defaults(func=_cmd_send)

    p = sub.add_parser("recv", help="receive files until interrupted")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_recv)

    return parser


def run(argv=None) -> int:
    """Parse arguments and execute one subcommand; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except StegoStreamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
