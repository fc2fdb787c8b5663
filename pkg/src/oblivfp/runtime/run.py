"""Launching party programs: threads over in-process queues or TCP sockets."""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass

from .. import shamir
from ..errors import ConfigError, OblivError, PeerAbort, ProtocolError
from ..fixedpoint import DEFAULT_FORMAT, FxFormat
from ..prg import XofRng
from .context import CostReport, PartyContext
from .transport import LocalNetwork, TcpEndpoint

SEED_ENV = "OBLIV_SEED"


def resolve_seed(seed):
    """Explicit seed, else $OBLIV_SEED, else None (fresh OS randomness)."""
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return None
    try:
        return int(env)
    except ValueError:
        return env


def party_rng(seed, pid: int) -> XofRng:
    if seed is None:
        return XofRng(None)
    return XofRng(f"obliv-run/{seed}/party/{pid}")


@dataclass
class RunHandle:
    outputs: list
    contexts: list
    wall_time: float

    @property
    def costs(self) -> list:
        return [c.report() for c in self.contexts]

    @property
    def transcripts(self) -> list:
        return [c.transcript for c in self.contexts]

    @property
    def openings(self) -> list:
        return [c.openings for c in self.contexts]


def cost_report(handle: RunHandle) -> CostReport:
    """Operation and round counts (identical at every party) plus total bytes sent."""
    reps = handle.costs
    first = reps[0]
    for r in reps[1:]:
        if (r.interactive_ops, r.rounds) != (first.interactive_ops, first.rounds):
            raise ProtocolError("parties disagree on operation counts")
    out = first.copy()
    out.bytes_sent = sum(r.bytes_sent for r in reps)
    for lab, b in out.breakdown.items():
        b["bytes"] = sum(r.breakdown.get(lab, {}).get("bytes", 0) for r in reps)
    return out


def _run_threads(n, make_endpoint, abort, program, cfg, fmt, seed, timeout, trunc_exact):
    outputs = [None] * n
    errors = [None] * n
    contexts = [None] * n

    def body(pid):
        ep = None
        try:
            ep = make_endpoint(pid)
            ctx = PartyContext(pid, cfg, ep, party_rng(seed, pid), fmt=fmt,
                               timeout=timeout, trunc_exact=trunc_exact)
            contexts[pid - 1] = ctx
            outputs[pid - 1] = program(ctx)
        except BaseException as e:  # noqa: BLE001 - reported to the caller below
            errors[pid - 1] = e
            abort.set()
        finally:
            if ep is not None:
                ep.close()

    threads = [threading.Thread(target=body, args=(p,), name=f"party-{p}", daemon=True)
               for p in range(1, n + 1)]
    t0 = time.perf_counter()
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    wall = time.perf_counter() - t0
    primary = [e for e in errors if e is not None and not isinstance(e, PeerAbort)]
    if primary:
        raise primary[0]
    if any(errors):
        raise next(e for e in errors if e is not None)
    return RunHandle(outputs, contexts, wall)


def spawn_parties(cfg: shamir.ShamirConfig, program, *, mode: str = "local", seed=None,
                  fmt: FxFormat = DEFAULT_FORMAT, timeout: float = 30.0,
                  trunc_exact: bool = False, topology: dict | None = None) -> RunHandle:
    """Run ``program(ctx)`` at all ``cfg.n`` parties and collect their outputs.

    ``mode="local"`` uses in-process queues; ``mode="tcp"`` opens real
    loopback (or topology) sockets, still one thread per party.
    """
    if not isinstance(cfg, shamir.ShamirConfig):
        raise ConfigError("cfg must be a ShamirConfig")
    seed = resolve_seed(seed)
    if mode == "local":
        net = LocalNetwork(cfg.n)
        return _run_threads(cfg.n, net.endpoint, net.abort, program, cfg, fmt, seed,
                            timeout, trunc_exact)
    if mode == "tcp":
        if topology is None:
            topology = loopback_topology(cfg.n)
        if sorted(topology) != list(range(1, cfg.n + 1)):
            raise ConfigError("topology must list parties 1..n")
        abort = threading.Event()
        return _run_threads(cfg.n, lambda pid: TcpEndpoint(pid, topology, abort=abort),
                            abort, program, cfg, fmt, seed, timeout, trunc_exact)
    raise ConfigError(f"unknown mode {mode!r}")


def run_party(pid: int, cfg: shamir.ShamirConfig, topology: dict, program, *, seed=None,
              fmt: FxFormat = DEFAULT_FORMAT, timeout: float = 30.0,
              trunc_exact: bool = False):
    """Run one party of a networked computation in the current process."""
    seed = resolve_seed(seed)
    ep = TcpEndpoint(pid, topology)
    try:
        ctx = PartyContext(pid, cfg, ep, party_rng(seed, pid), fmt=fmt, timeout=timeout,
                           trunc_exact=trunc_exact)
        out = program(ctx)
        return out, ctx
    finally:
        ep.close()


def loopback_topology(n: int, host: str = "127.0.0.1") -> dict:
    """Free ports on the loopback interface for ``n`` parties."""
    import socket

    socks, topo = [], {}
    for pid in range(1, n + 1):
        s = socket.socket()
        s.bind((host, 0))
        socks.append(s)
        topo[pid] = (host, s.getsockname()[1])
    for s in socks:
        s.close()
    return topo


__all__ = ["RunHandle", "cost_report", "spawn_parties", "run_party", "loopback_topology",
           "OblivError", "SEED_ENV"]
