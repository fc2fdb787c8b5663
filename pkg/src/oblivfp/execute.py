"""Run one engine-generic program securely or in the clear.

A *program* is a callable ``program(E)`` that builds its inputs with
``E.input`` / ``E.const`` and returns SArrays, possibly nested in lists,
tuples or dicts.  Both runners return the same nested structure with each
SArray replaced by its raw integers (an object array, or an int for
scalars), so outputs from the two engines compare with ``==``.
"""

from __future__ import annotations

import numpy as np

from .engine import PlainEngine, SArray, SecureEngine
from .fixedpoint import DEFAULT_FORMAT, FxFormat
from .runtime import cost_report, spawn_parties
from .shamir import ShamirConfig


def _flatten(tree, acc):
    if isinstance(tree, SArray):
        acc.append(tree)
    elif isinstance(tree, (list, tuple)):
        for t in tree:
            _flatten(t, acc)
    elif isinstance(tree, dict):
        for t in tree.values():
            _flatten(t, acc)
    return acc


def _rebuild(tree, it):
    if isinstance(tree, SArray):
        return next(it)
    if isinstance(tree, list):
        return [_rebuild(t, it) for t in tree]
    if isinstance(tree, tuple):
        return tuple(_rebuild(t, it) for t in tree)
    if isinstance(tree, dict):
        return {k: _rebuild(v, it) for k, v in tree.items()}
    return tree


def _scalarize(v):
    v = np.asarray(v, dtype=object)
    return int(v) if v.ndim == 0 else v


def reveal_outputs(E, tree):
    """Open every SArray in ``tree`` (one round for all of them)."""
    arrays = _flatten(tree, [])
    secret = [a for a in arrays if not a.public]
    opened = {}
    if secret:
        from .engine import cat
        flat = cat([a.with_frac(0).flatten() for a in secret])
        vals = E.open(flat, kind="output")
        pos = 0
        for a in secret:
            opened[id(a)] = np.asarray(vals[pos:pos + a.size], dtype=object).reshape(a.shape)
            pos += a.size
    res = []
    for a in arrays:
        if a.public:
            res.append(_scalarize(E.open(a)))
        else:
            res.append(_scalarize(opened[id(a)]))
    return _rebuild(tree, iter(res))


def run_plain(program, fmt: FxFormat = DEFAULT_FORMAT, seed=0, check_ranges: bool = True):
    """Evaluate ``program`` with :class:`PlainEngine`; returns (outputs, engine)."""
    E = PlainEngine(fmt, seed=seed, check_ranges=check_ranges)
    return reveal_outputs(E, program(E)), E


def party_program(program, fmt: FxFormat = DEFAULT_FORMAT):
    """Wrap ``program(E)`` as a per-party ``fn(ctx)`` returning (outputs, min kappa)."""
    def party(ctx):
        E = SecureEngine(ctx, fmt)
        with ctx.label("program"):
            out = program(E)
        return reveal_outputs(E, out), E.min_kappa
    return party


def run_secure(program, *, n: int = 3, t: int = 1, seed=0, fmt: FxFormat = DEFAULT_FORMAT,
               trunc_exact: bool = False, mode: str = "local", kappa: int = 48,
               timeout: float = 30.0, topology=None):
    """Evaluate ``program`` at ``n`` parties; returns (outputs, handle).

    Every party must reconstruct the same outputs; the handle carries
    contexts, transcripts and costs (see :func:`oblivfp.runtime.cost_report`).
    """
    cfg = ShamirConfig(n=n, t=t, kappa=kappa)
    party = party_program(program, fmt)
    h = spawn_parties(cfg, party, mode=mode, seed=seed, fmt=fmt, timeout=timeout,
                      trunc_exact=trunc_exact, topology=topology)
    first = h.outputs[0][0]
    h.min_kappa = min(o[1] for o in h.outputs)
    return first, h


__all__ = ["run_plain", "run_secure", "party_program", "reveal_outputs", "cost_report"]
