"""Per-party protocol state: channels, randomness, PRSS keys and the cost meter."""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field as dc_field

import numpy as np

from .. import field as F
from .. import shamir
from ..errors import ProtocolError
from ..fixedpoint import DEFAULT_FORMAT, FxFormat
from ..prg import XofRng
from .transport import SETUP_TAG, pack_frame, unpack_frame


@dataclass
class CostReport:
    """Interactive operations, rounds and bytes, with an inclusive per-label breakdown."""

    interactive_ops: int = 0
    rounds: int = 0
    bytes_sent: int = 0
    breakdown: dict = dc_field(default_factory=dict)

    def _bucket(self, label):
        return self.breakdown.setdefault(label, {"ops": 0, "rounds": 0, "bytes": 0})

    def as_dict(self) -> dict:
        return {"interactive_ops": self.interactive_ops, "rounds": self.rounds,
                "bytes_sent": self.bytes_sent,
                "breakdown": {k: dict(v) for k, v in sorted(self.breakdown.items())}}

    def copy(self) -> "CostReport":
        return CostReport(self.interactive_ops, self.rounds, self.bytes_sent,
                          {k: dict(v) for k, v in self.breakdown.items()})

    def __sub__(self, other: "CostReport") -> "CostReport":
        out = CostReport(self.interactive_ops - other.interactive_ops,
                         self.rounds - other.rounds, self.bytes_sent - other.bytes_sent)
        for k, v in self.breakdown.items():
            o = other.breakdown.get(k, {"ops": 0, "rounds": 0, "bytes": 0})
            d = {f: v[f] - o[f] for f in v}
            if any(d.values()):
                out.breakdown[k] = d
        return out


@dataclass(frozen=True)
class Opening:
    """Record of one batch of values made public."""

    round: int
    kind: str          # "masked" (statistically hidden) or "reveal"
    label: str
    count: int


class PartyContext:
    """Everything one party needs to run a straight-line protocol program.

    ``interact`` is the only way to communicate during the online phase:
    it performs any number of independent multiplications and openings in
    a single round.
    """

    def __init__(self, pid: int, cfg: shamir.ShamirConfig, endpoint, rng: XofRng,
                 fmt: FxFormat = DEFAULT_FORMAT, timeout: float = 30.0,
                 trunc_exact: bool = False):
        self.pid = pid
        self.cfg = cfg
        self.n, self.t = cfg.n, cfg.t
        self.fmt = fmt
        self.endpoint = endpoint
        self.rng = rng
        self.timeout = timeout
        self.trunc_exact = trunc_exact
        self.peers = [p for p in range(1, self.n + 1) if p != pid]
        self.cost = CostReport()
        self.transcript: list[tuple[int, int, int, int]] = []
        self.openings: list[Opening] = []
        self.setup_bytes = 0
        self._labels: list[str] = []
        self._tag = 0
        self._lam_all = shamir.lagrange_field(tuple(range(1, self.n + 1)))
        self._prss: list[tuple[np.ndarray, XofRng]] = []
        self.n_prss_keys = cfg.n_prss_keys
        self._setup_prss()

    # ------------------------------------------------------------------ labels
    @contextmanager
    def label(self, name: str):
        self._labels.append(name)
        try:
            yield
        finally:
            self._labels.pop()

    @property
    def current_label(self) -> str:
        return self._labels[-1] if self._labels else ""

    def _charge(self, ops=0, rounds=0, nbytes=0):
        c = self.cost
        c.interactive_ops += ops
        c.rounds += rounds
        c.bytes_sent += nbytes
        for lab in set(self._labels):
            b = c._bucket(lab)
            b["ops"] += ops
            b["rounds"] += rounds
            b["bytes"] += nbytes

    # --------------------------------------------------------------- messaging
    def _exchange(self, payloads: dict, tag: int | None = None, count=True) -> dict:
        """Send one frame to every peer, then read one frame from every peer."""
        if tag is None:
            tag = self._tag
            self._tag += 1
        sent = 0
        for dst in self.peers:
            frame = pack_frame(self.pid, tag, payloads.get(dst, b""))
            self.endpoint.send(dst, frame)
            sent += len(frame)
            self.transcript.append((tag, self.pid, dst, len(frame)))
        if count:
            self._charge(nbytes=sent)
        else:
            self.setup_bytes += sent
        got = {}
        for src in self.peers:
            sender, rtag, payload = unpack_frame(self.endpoint.recv(src, self.timeout))
            if sender != src or rtag != tag:
                raise ProtocolError(f"party {self.pid}: expected round {tag} from {src}, "
                                    f"got round {rtag} from {sender}")
            got[src] = payload
        return got

    def _setup_prss(self):
        subsets = shamir.prss_subsets(self.n, self.t)
        out = {}
        mine = {}
        for a in subsets:
            if a[0] == self.pid:
                key = self.rng.bytes(32)
                mine[a] = key
                for d in a[1:]:
                    out.setdefault(d, []).append(key)
        got = self._exchange({d: b"".join(ks) for d, ks in out.items()}, tag=SETUP_TAG, count=False)
        for a in subsets:
            if self.pid not in a:
                continue
            if a[0] == self.pid:
                key = mine[a]
            else:
                # keys from a given leader arrive in subset order
                lead = a[0]
                idx = [b for b in subsets if b[0] == lead and self.pid in b].index(a)
                key = got[lead][32 * idx:32 * idx + 32]
                if len(key) != 32:
                    raise ProtocolError("short PRSS key")
            w = F.const(shamir.prss_weight(a, self.pid, self.n))
            self._prss.append((w, XofRng(key)))

    # -------------------------------------------------------------- randomness
    def prss_field(self, shape) -> np.ndarray:
        """Share of a uniform random field element per entry (no interaction)."""
        acc = F.zeros(shape)
        for w, st in self._prss:
            acc = F.add(acc, F.mul(F.random(st, shape), w))
        return acc

    def prss_int(self, shape, bits: int) -> np.ndarray:
        """Share of a random integer in ``[0, n_keys * 2**bits)`` per entry."""
        acc = F.zeros(shape)
        for w, st in self._prss:
            acc = F.add(acc, F.mul(F.random_bounded(st, shape, bits), w))
        return acc

    @property
    def prss_slack_bits(self) -> int:
        return max(0, math.ceil(math.log2(self.n_prss_keys)))

    # ------------------------------------------------------------- interaction
    def interact(self, mults=(), opens=()):
        """One communication round.

        ``mults``: pairs of degree-t share arrays; returns degree-t shares of
        the products.  ``opens``: ``(shares, kind)`` pairs; returns the public
        values as field arrays.  Costs ``sum of element counts`` operations
        and exactly one round (nothing if both lists are empty).
        """
        mults = list(mults)
        opens = list(opens)
        m_shapes = [F.shape_of(a) for a, _ in mults]
        o_shapes = [F.shape_of(x) for x, _ in opens]
        m_sizes = [int(np.prod(s, dtype=np.int64)) for s in m_shapes]
        o_sizes = [int(np.prod(s, dtype=np.int64)) for s in o_shapes]
        nm, no = sum(m_sizes), sum(o_sizes)
        if nm + no == 0:
            return [F.empty(s) for s in m_shapes], [F.empty(s) for s in o_shapes]
        prod = F.empty((nm,))
        pos = 0
        for (a, b), sz in zip(mults, m_sizes):
            prod[pos:pos + sz] = F.mul(a, b).reshape(sz, 2)
            pos += sz
        op = F.empty((no,))
        pos = 0
        for (x, _), sz in zip(opens, o_sizes):
            op[pos:pos + sz] = np.ascontiguousarray(x).reshape(sz, 2)
            pos += sz
        reshared = shamir.share_array(prod, self.n, self.t, self.rng) if nm else F.empty((self.n, 0))
        obytes = F.encode_bytes(op)
        payloads = {d: F.encode_bytes(reshared[d - 1]) + obytes for d in self.peers}
        tag = self._tag
        got = self._exchange(payloads, count=True)
        self._charge(ops=nm + no, rounds=1)
        for kind, sz in ((k, s) for (_, k), s in zip(opens, o_sizes)):
            self.openings.append(Opening(tag, kind, self.current_label, sz))
        mstack = F.empty((self.n, nm))
        ostack = F.empty((self.n, no))
        for j in range(1, self.n + 1):
            if j == self.pid:
                mstack[j - 1] = reshared[j - 1]
                ostack[j - 1] = op
                continue
            buf = got[j]
            if len(buf) != 16 * (nm + no):
                raise ProtocolError(f"party {self.pid}: round {tag} payload from {j} has "
                                    f"{len(buf)} bytes, expected {16 * (nm + no)}")
            mstack[j - 1] = F.decode_bytes(buf[:16 * nm], (nm,))
            ostack[j - 1] = F.decode_bytes(buf[16 * nm:], (no,))
        mres = F.dot(self._lam_all, mstack) if nm else F.empty((0,))
        ores = F.dot(self._lam_all, ostack) if no else F.empty((0,))
        outs_m, pos = [], 0
        for s, sz in zip(m_shapes, m_sizes):
            outs_m.append(mres[pos:pos + sz].reshape(tuple(s) + (2,)))
            pos += sz
        outs_o, pos = [], 0
        for s, sz in zip(o_shapes, o_sizes):
            outs_o.append(ores[pos:pos + sz].reshape(tuple(s) + (2,)))
            pos += sz
        return outs_m, outs_o

    def input(self, owner: int, shape, values: np.ndarray | None = None) -> np.ndarray:
        """Secret-share ``values`` (a field array held by ``owner``) with everyone.

        Shapes are public.  This is a communication step but not an
        interactive operation in the cost convention.
        """
        shape = tuple(shape)
        size = int(np.prod(shape, dtype=np.int64))
        if self.pid == owner:
            if values is None or F.shape_of(values) != shape:
                raise ProtocolError("input owner must supply values of the declared shape")
            sh = shamir.share_array(np.ascontiguousarray(values).reshape(size, 2),
                                    self.n, self.t, self.rng)
            self._exchange({d: F.encode_bytes(sh[d - 1]) for d in self.peers})
            return sh[self.pid - 1].reshape(shape + (2,))
        got = self._exchange({})
        buf = got[owner]
        if len(buf) != 16 * size:
            raise ProtocolError(f"input from party {owner}: {len(buf)} bytes for shape {shape}")
        return F.decode_bytes(buf, shape)

    def report(self) -> CostReport:
        return self.cost.copy()
