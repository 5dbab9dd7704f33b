"""LAN file transfer for stego audio, one file per connection.

Wire format (big-endian lengths):

    magic     4 bytes  "STG1"
    name_len  u16      byte length of the UTF-8 file name (1..255)
    name      bytes    no path separators
    body_len  u64      payload byte count
    body      bytes    file content
    checksum  u32      CRC-32 of the payload

The receiver streams the payload to a temporary file, renames it into
place only after the checksum verifies, and answers one acknowledgment
byte: 0x00 accepted, 0x01 rejected. Frames with a bad magic are dropped
without an acknowledgment. Connections are handled concurrently and a
failing one never stops the server.
"""

from __future__ import annotations

import logging
import os
import socket
import struct
import tempfile
import threading
import zlib
from pathlib import Path

from .errors import BindFailed, ConnectFailed, RemoteRejected, TransferIoError

log = logging.getLogger(__name__)

MAGIC = b"STG1"
ACK_OK = b"\x00"
ACK_REJECTED = b"\x01"
MAX_NAME_BYTES = 255
_CHUNK = 64 * 1024
DEFAULT_TIMEOUT = 30.0


def encode_frame(name: str, payload: bytes) -> bytes:
    """Build one wire frame; the name must be a bare file name."""
    name_bytes = name.encode("utf-8")
    if not _name_ok(name, name_bytes):
        raise ValueError(f"invalid transfer file name: {name!r}")
    return b"".join(
        (
            MAGIC,
            struct.pack(">H", len(name_bytes)),
            name_bytes,
            struct.pack(">Q", len(payload)),
            payload,
            struct.pack(">I", zlib.crc32(payload)),
        )
    )


def _name_ok(name: str, name_bytes: bytes) -> bool:
    if not 1 <= len(name_bytes) <= MAX_NAME_BYTES:
        return False
    if "/" in name or "\\" in name:
        return False
    return name not in (".", "..")


def _recv_exact(conn: socket.socket, count: int) -> bytes | None:
    """Read exactly `count` bytes; None if the peer closed early."""
    chunks = []
    remaining = count
    while remaining > 0:
        piece = conn.recv(min(remaining, _CHUNK))
        if not piece:
            return None
        chunks.append(piece)
        remaining -= len(piece)
    return b"".join(chunks)


def send_file(host: str, port: int, file_path, timeout: float = DEFAULT_TIMEOUT) -> int:
    """Send one file; returns the number of frame bytes written.

    The connection originates from an ephemeral local port. Raises
    ConnectFailed when the receiver is unreachable, RemoteRejected when it
    answers 0x01, and TransferIoError when the connection dies early.
    """
    path = Path(file_path)
    frame = encode_frame(path.name, path.read_bytes())
    try:
        conn = socket.create_connection((host, port), timeout=timeout)
    except OSError as exc:
        raise ConnectFailed(f"cannot reach {host}:{port}: {exc}") from exc
    with conn:
        try:
            conn.sendall(frame)
            ack = _recv_exact(conn, 1)
        except OSError as exc:
            raise TransferIoError(f"transfer to {host}:{port} failed: {exc}") from exc
    if ack is None:
        raise TransferIoError(f"{host}:{port} closed the connection without acknowledging")
    if ack != ACK_OK:
        raise RemoteRejected(f"{host}:{port} rejected the file (ack {ack.hex()})")
    return len(frame)


class FileReceiver:
    """Accepts transfer connections and stores verified files in out_dir."""

    def __init__(self, port: int, out_dir, host: str = "0.0.0.0",
                 timeout: float = DEFAULT_TIMEOUT):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.timeout = timeout
        self._name_lock = threading.Lock()
        self._workers: set[threading.Thread] = set()
        self._accept_thread: threading.Thread | None = None
        self._closing = False
        try:
            self._listener = socket.create_server((host, port))
        except OSError as exc:
            raise BindFailed(f"cannot listen on {host}:{port}: {exc}") from exc
        # closing a socket does not reliably wake a blocked accept(); poll
        self._listener.settimeout(0.2)
        self.port = self._listener.getsockname()[1]

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc_info):
        self.stop()

    def start(self):
        """Accept connections on a background thread."""
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def serve_forever(self):
        """Accept connections on the calling thread until stop()."""
        self._accept_loop()

    def stop(self):
        self._closing = True
        try:
            self._listener.close()
        except OSError:
            pass
        if self._accept_thread is not None:
            self._accept_thread.join(timeout=5)
        for worker in list(self._workers):
            worker.join(timeout=5)

    def _accept_loop(self):
        while not self._closing:
            try:
                conn, addr = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                if not self._closing:
                    log.warning("listener closed unexpectedly")
                return
            conn.settimeout(self.timeout)
            worker = threading.Thread(target=self._run_connection, args=(conn, addr), daemon=True)
            self._workers.add(worker)
            worker.start()

    def _run_connection(self, conn: socket.socket, addr):
        try:
            with conn:
                self._handle(conn, addr)
        except Exception:
            log.warning("connection from %s failed", addr, exc_info=True)
        finally:
            self._workers.discard(threading.current_thread())

    def _handle(self, conn: socket.socket, addr):
        magic = _recv_exact(conn, 4)
        if magic != MAGIC:
            log.warning("dropping connection from %s: bad magic %r", addr, magic)
            return
        header = _recv_exact(conn, 2)
        if header is None:
            return
        (name_len,) = struct.unpack(">H", header)
        name_bytes = _recv_exact(conn, name_len)
        if name_bytes is None:
            return
        try:
            name = name_bytes.decode("utf-8")
        except UnicodeDecodeError:
            name = None
        name_valid = name is not None and _name_ok(name, name_bytes)
        length_field = _recv_exact(conn, 8)
        if length_field is None:
            return
        (body_len,) = struct.unpack(">Q", length_field)

        crc = 0
        received = 0
        stored = None
        reject_reason = None
        tmp = tempfile.NamedTemporaryFile(dir=self.out_dir, prefix=".incoming-", delete=False)
        try:
            with tmp:
                while received < body_len:
                    piece = conn.recv(min(body_len - received, _CHUNK))
                    if not piece:
                        return
                    tmp.write(piece)
                    crc = zlib.crc32(piece, crc)
                    received += len(piece)
            checksum_field = _recv_exact(conn, 4)
            if checksum_field is None:
                return
            (expected_crc,) = struct.unpack(">I", checksum_field)
            if not name_valid:
                reject_reason = f"unsafe or invalid name {name_bytes!r}"
            elif crc != expected_crc:
                reject_reason = f"checksum mismatch for {name!r}"
            else:
                stored = self._store(tmp.name, name)
        finally:
            # clean up before acknowledging so the peer never observes
            # a half-finished out_dir
            if os.path.exists(tmp.name):
                os.unlink(tmp.name)
        if reject_reason is not None:
            log.warning("rejecting %s: %s", addr, reject_reason)
            conn.sendall(ACK_REJECTED)
        else:
            log.info("stored %s (%d bytes) from %s", stored, received, addr)
            conn.sendall(ACK_OK)

    def _store(self, tmp_name: str, name: str) -> Path:
        """Move the verified temp file to a collision-free final name."""
        stem, dot, suffix = name.partition(".")
        with self._name_lock:
            candidate = self.out_dir / name
            counter = 1
            while candidate.exists():
                candidate = self.out_dir / f"{stem}-{counter}{dot}{suffix}"
                counter += 1
            os.replace(tmp_name, candidate)
        return candidate


def serve(port: int, out_dir, host: str = "0.0.0.0"):
    """Run a receiver on the calling thread until interrupted."""
    receiver = FileReceiver(port, out_dir, host=host)
    try:
        receiver.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        receiver.stop()
