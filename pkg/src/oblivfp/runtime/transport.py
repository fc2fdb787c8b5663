"""Framed point-to-point channels between parties.

Every message is a frame: u32 payload length, u8 sender id, u32 round tag,
then the payload, all little-endian.  The in-process network pushes the
same bytes through per-link queues, so both modes exercise the codec.
"""

from __future__ import annotations

import queue
import socket
import struct
import threading
import time

from ..errors import DeadlockError, PeerAbort, ProtocolError, TransportError

HEADER = struct.Struct("<IBI")
SETUP_TAG = 0xFFFFFFFF
_POLL = 0.05


def pack_frame(sender: int, tag: int, payload: bytes) -> bytes:
    return HEADER.pack(len(payload), sender, tag) + payload


def unpack_frame(frame: bytes) -> tuple[int, int, bytes]:
    """Return (sender, tag, payload); checks the length field."""
    if len(frame) < HEADER.size:
        raise ProtocolError("truncated frame header")
    length, sender, tag = HEADER.unpack_from(frame)
    payload = frame[HEADER.size:]
    if len(payload) != length:
        raise ProtocolError(f"frame length field {length} != payload size {len(payload)}")
    return sender, tag, payload


class _Inbox:
    """Per-sender FIFO queues with abort-aware, timed receive."""

    def __init__(self, peers, abort: threading.Event):
        self.q = {p: queue.Queue() for p in peers}
        self.abort = abort

    def get(self, src: int, timeout: float) -> bytes:
        deadline = time.monotonic() + timeout
        q = self.q[src]
        while True:
            if self.abort.is_set():
                raise PeerAbort("another party failed; stopping")
            left = deadline - time.monotonic()
            if left <= 0:
                raise DeadlockError(f"no frame from party {src} within {timeout:g} s")
            try:
                item = q.get(timeout=min(_POLL, left))
            except queue.Empty:
                continue
            if item is None:
                raise TransportError(f"connection to party {src} closed")
            return item


class LocalNetwork:
    """All parties in one process; links are queues carrying encoded frames."""

    def __init__(self, n: int):
        self.n = n
        self.abort = threading.Event()
        ids = range(1, n + 1)
        self._inbox = {d: _Inbox([s for s in ids if s != d], self.abort) for d in ids}

    def endpoint(self, pid: int) -> "LocalEndpoint":
        return LocalEndpoint(self, pid)


class LocalEndpoint:
    def __init__(self, net: LocalNetwork, pid: int):
        self.net, self.pid = net, pid
        self.abort = net.abort

    def send(self, dst: int, frame: bytes) -> None:
        self.net._inbox[dst].q[self.pid].put(frame)

    def recv(self, src: int, timeout: float) -> bytes:
        return self.net._inbox[self.pid].get(src, timeout)

    def close(self) -> None:
        pass


def _recv_exact(sock: socket.socket, n: int) -> bytes | None:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return bytes(buf)


class TcpEndpoint:
    """One party's sockets: a listener for inbound links, one outbound link per peer.

    The first frame on every outbound connection is a hello carrying the
    sender id under the setup tag.
    """

    def __init__(self, pid: int, topology: dict, connect_timeout: float = 30.0,
                 abort: threading.Event | None = None):
        self.pid = pid
        self.topology = topology
        self.abort = abort or threading.Event()
        peers = [p for p in topology if p != pid]
        self._inbox = _Inbox(peers, self.abort)
        host, port = topology[pid]
        self._listener = socket.create_server((host, port), reuse_port=False)
        self._listener.settimeout(_POLL)
        self._threads = []
        self._in_socks = []
        self._accepted = 0
        self._closing = False
        acc = threading.Thread(target=self._accept_loop, args=(len(peers),), daemon=True)
        acc.start()
        self._threads.append(acc)
        self._out = {}
        deadline = time.monotonic() + connect_timeout
        for p in peers:
            self._out[p] = self._connect(topology[p], deadline)
            self._out[p].sendall(pack_frame(pid, SETUP_TAG, b"hello"))
        acc.join(max(0.0, deadline - time.monotonic()))
        if self._accepted < len(peers):
            self.close()
            raise TransportError(f"party {pid}: only {self._accepted} of {len(peers)} peers connected")

    def _connect(self, addr, deadline):
        last = None
        while time.monotonic() < deadline:
            try:
                s = socket.create_connection(addr, timeout=2.0)
                s.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
                s.settimeout(None)
                return s
            except OSError as e:
                last = e
                time.sleep(0.05)
        raise TransportError(f"party {self.pid}: cannot connect to {addr}: {last}")

    def _accept_loop(self, expected):
        while self._accepted < expected and not self._closing:
            try:
                conn, _ = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            conn.settimeout(None)
            conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            head = _recv_exact(conn, HEADER.size)
            if head is None:
                conn.close()
                continue
            length, sender, tag = HEADER.unpack(head)
            _recv_exact(conn, length)
            if tag != SETUP_TAG or sender not in self._inbox.q:
                conn.close()
                continue
            self._in_socks.append(conn)
            t = threading.Thread(target=self._reader, args=(conn, sender), daemon=True)
            t.start()
            self._threads.append(t)
            self._accepted += 1

    def _reader(self, conn, sender):
        q = self._inbox.q[sender]
        while True:
            try:
                head = _recv_exact(conn, HEADER.size)
            except OSError:
                head = None
            if head is None:
                q.put(None)
                return
            length = HEADER.unpack(head)[0]
            body = _recv_exact(conn, length)
            if body is None:
                q.put(None)
                return
            q.put(head + body)

    def send(self, dst: int, frame: bytes) -> None:
        try:
            self._out[dst].sendall(frame)
        except OSError as e:
            raise TransportError(f"send to party {dst} failed: {e}") from e

    def recv(self, src: int, timeout: float) -> bytes:
        return self._inbox.get(src, timeout)

    def close(self) -> None:
        self._closing = True
        for s in list(self._out.values()) + self._in_socks:
            try:
                s.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            s.close()
        self._listener.close()


def read_topology(path) -> dict:
    """Parse a topology file: one ``id host port`` line per party."""
    from ..errors import ParseError

    topo = {}
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ParseError("expected 'id host port'", path, ln)
            try:
                pid, port = int(parts[0]), int(parts[2])
            except ValueError:
                raise ParseError("id and port must be integers", path, ln) from None
            if pid in topo:
                raise ParseError(f"duplicate party id {pid}", path, ln, 1)
            topo[pid] = (parts[1], port)
    if sorted(topo) != list(range(1, len(topo) + 1)):
        raise ParseError("party ids must be 1..n", path)
    return topo
