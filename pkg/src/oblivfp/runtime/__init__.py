"""Party runtime: contexts, transports, launching and cost accounting."""

from .context import CostReport, Opening, PartyContext
from .run import RunHandle, cost_report, loopback_topology, run_party, spawn_parties
from .transport import pack_frame, read_topology, unpack_frame

__all__ = ["CostReport", "Opening", "PartyContext", "RunHandle", "cost_report",
           "loopback_topology", "pack_frame", "read_topology", "run_party", "spawn_parties",
           "unpack_frame"]
