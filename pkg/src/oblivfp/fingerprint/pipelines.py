"""End-to-end pipelines: inputs from templates, secure or plaintext execution, decoded outputs.

Party 1 owns the gallery template T and party 2 the probe S.  Both
runners return a :class:`PipelineResult` whose ``values`` hold exact raw
integers (fixed-point outputs have ``k`` fractional bits), so secure and
plaintext results compare with ``==``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import ConfigError
from ..execute import run_plain, run_secure
from ..fixedpoint import DEFAULT_FORMAT, FxFormat
from ..numerics import SelectParams
from ..runtime import cost_report
from . import protocols as P
from .types import (HCTemplate, HighCurvatureParams, MatchThresholds, MinutiaeTemplate,
                    PipelineResult, RotationTable, SpectralTemplate)

PIPELINES = ("geom", "hc", "spectral")
GALLERY, PROBE = 1, 2


@dataclass
class PipelineParams:
    """Public parameters shared by all pipelines (unused ones are ignored)."""

    thr: MatchThresholds = field(default_factory=MatchThresholds)
    coord_bits: int | None = None
    precision: int | None = None
    hc: HighCurvatureParams | None = None
    select: SelectParams | None = None
    mag_bits: int = 1


def _minutiae_inputs(E, tpl, owner):
    arr = tpl.array() if isinstance(tpl, MinutiaeTemplate) else tpl.minutiae_array()
    n = arr.shape[0]
    raw = arr.T.copy()
    v = E.input(owner, (3, n), raw)
    return v[0], v[1], v[2]


def _hc_inputs(E, tpl: HCTemplate, owner):
    raw = tpl.points_raw(E.fmt)
    return E.input(owner, raw.shape, raw, frac=E.fmt.k)


def _spectral_inputs(E, tpl: SpectralTemplate, owner):
    a, b = tpl.raw(E.fmt)
    v = E.input(owner, (2,) + a.shape, np.stack([a, b]), frac=E.fmt.k)
    return v[0], v[1]


def _check_coords(tpls, fmt, coord_bits):
    cb = coord_bits or P.default_coord_bits(fmt)
    for t in tpls:
        arr = t.array() if isinstance(t, MinutiaeTemplate) else t.minutiae_array()
        if arr.size and int(np.abs(arr[:, :2]).max()) >= 1 << cb:
            raise ConfigError(f"minutia coordinates exceed the {cb}-bit bound")


def make_program(protocol: str, T, S, params: PipelineParams, fmt: FxFormat, extras: dict):
    """``program(E)`` for :mod:`oblivfp.execute`; ``extras`` collects instrumentation."""
    if protocol == "geom":
        if not isinstance(T, MinutiaeTemplate) or not isinstance(S, MinutiaeTemplate):
            T = MinutiaeTemplate(T.minutiae)
            S = MinutiaeTemplate(S.minutiae)
        _check_coords([T, S], fmt, params.coord_bits)

        def program(E):
            Tm = _minutiae_inputs(E, T, GALLERY)
            Sm = _minutiae_inputs(E, S, PROBE)
            c, dx, dy, dth = P.s_geom_trans(Tm, Sm, params.thr, params.precision,
                                            params.coord_bits)
            return {"C_max": c, "dx": dx, "dy": dy, "dtheta": dth}
        return program

    if protocol == "hc":
        if not isinstance(T, HCTemplate) or not isinstance(S, HCTemplate):
            raise ConfigError("the hc pipeline needs templates with high curvature points")
        _check_coords([T, S], fmt, params.coord_bits)
        hcp = params.hc or HighCurvatureParams.with_default_boxes(
            min(len(S.points), 8), 2, T.points)

        def program(E):
            Tm = _minutiae_inputs(E, T, GALLERY)
            Th = _hc_inputs(E, T, GALLERY)
            Sm = _minutiae_inputs(E, S, PROBE)
            Sh = _hc_inputs(E, S, PROBE)
            tr = {}
            C, R, v, deg = P.s_high_curvature(Tm, Th, Sm, Sh, hcp, params.thr, params.select,
                                              params.coord_bits, trace=tr)
            extras["select"] = tr.get("select")
            return {"C": C, "R": R, "v": v, "dtheta": deg}
        return program

    if protocol == "spectral":
        if not isinstance(T, SpectralTemplate) or not isinstance(S, SpectralTemplate):
            raise ConfigError("the spectral pipeline needs spectral templates")
        if T.dims != S.dims or T.N != S.N:
            raise ConfigError("spectral templates must share dimensions")
        Z = RotationTable.build(T.dims[1], T.N, fmt)

        def program(E):
            Ta, Tb = _spectral_inputs(E, T, GALLERY)
            Sa, Sb = _spectral_inputs(E, S, PROBE)
            counter = P.ScoreCounter()
            extras["scores"] = counter
            cmax, alpha = P.s_spectral(Ta, Tb, Sa, Sb, Z, counter, params.mag_bits)
            return {"C_max": cmax, "alpha_max": alpha}
        return program

    raise ConfigError(f"unknown pipeline {protocol!r}; choose from {', '.join(PIPELINES)}")


FX_FIELDS = {"geom": ("dx", "dy"), "hc": ("R", "v", "dtheta"), "spectral": ("C_max",)}


def _normalize(values: dict) -> dict:
    out = {}
    for key, v in values.items():
        if isinstance(v, np.ndarray):
            out[key] = [[int(x) for x in row] for row in v] if v.ndim == 2 else [int(x) for x in v]
        else:
            out[key] = int(v)
    return out


def run_plaintext(protocol: str, T, S, params: PipelineParams | None = None,
                  fmt: FxFormat = DEFAULT_FORMAT, seed: int = 0) -> PipelineResult:
    """The oracle: the same pipeline over exact integers with floor truncation."""
    params = params or PipelineParams()
    extras = {}
    prog = make_program(protocol, T, S, params, fmt, extras)
    t0 = time.perf_counter()
    out, E = run_plain(prog, fmt, seed=seed)
    res = PipelineResult(protocol, _normalize(out))
    res.extras = extras
    res.extras["wall_time"] = time.perf_counter() - t0
    res.extras["reveals"] = list(E.openings)
    return res


def run_pipeline(protocol: str, T, S, params: PipelineParams | None = None, *,
                 fmt: FxFormat = DEFAULT_FORMAT, n: int = 3, t: int = 1, seed: int = 0,
                 trunc_exact: bool = True, mode: str = "local", topology=None,
                 timeout: float = 120.0) -> PipelineResult:
    """Secure run at ``n`` parties; ``trunc_exact`` selects deterministic truncation."""
    params = params or PipelineParams()
    extras = {}
    prog = make_program(protocol, T, S, params, fmt, extras)
    out, h = run_secure(prog, n=n, t=t, seed=seed, fmt=fmt, trunc_exact=trunc_exact,
                        mode=mode, topology=topology, timeout=timeout)
    rep = cost_report(h)
    res = PipelineResult(protocol, _normalize(out), costs={
        "ops": rep.interactive_ops, "rounds": rep.rounds, "bytes": rep.bytes_sent})
    res.extras = extras
    res.extras["wall_time"] = h.wall_time
    res.extras["handle"] = h
    res.extras["report"] = rep
    return res


def decode_values(protocol: str, values: dict, fmt: FxFormat = DEFAULT_FORMAT) -> dict:
    """Raw outputs to exact Fractions (fixed-point fields) or ints."""
    fx = FX_FIELDS[protocol]
    scale = 1 << fmt.k

    def conv(v):
        if isinstance(v, list):
            return [conv(x) for x in v]
        return Fraction(v, scale)

    return {key: conv(v) if key in fx else v for key, v in values.items()}


__all__ = ["PIPELINES", "PipelineParams", "make_program", "run_plaintext", "run_pipeline",
           "decode_values", "FX_FIELDS"]
