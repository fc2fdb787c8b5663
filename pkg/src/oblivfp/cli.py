"""Command line front end: ``oblivfp run|verify|bench|gen``.

Every failure is reported on stderr as ``error: ...`` and the process
exits with the code attached to the exception class (see
:mod:`oblivfp.errors`).
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import blocks as B
from . import numerics as NUM
from .errors import ConfigError, OblivError, VerifyMismatch
from .execute import party_program, run_plain, run_secure
from .fingerprint import synth
from .fingerprint.pipelines import FX_FIELDS, PIPELINES, PipelineParams, make_program
from .fingerprint.templates import load_template, save_template
from .fingerprint.types import HCTemplate, HighCurvatureParams, MatchThresholds
from .fixedpoint import FxFormat, encode
from .report import build_report, format_report
from .runtime import cost_report, read_topology, run_party
from .shamir import ShamirConfig

# ---------------------------------------------------------------- block runs
# name -> (operand layout, evaluator, output is fixed point)
#   "unary": applied elementwise to every value
#   "binary": values are consumed as (a, b) pairs; a from party 1, b from party 2
#   "list": one vector owned by party 1


def _sort(x, o):
    return B.s_sort(x)[0]


def _select(x, o):
    if o.f is None:
        raise ConfigError("block:select needs --f (the rank)")
    return NUM.s_select(x, o.f)


BLOCKS = {
    "sin": ("unary", lambda x, o: NUM.s_sin(x, o.precision), True),
    "cos": ("unary", lambda x, o: NUM.s_cos(x, o.precision), True),
    "arctan": ("unary", lambda x, o: NUM.s_arctan(x, o.precision), True),
    "sqrt": ("unary", lambda x, o: NUM.s_sqrt(x), True),
    "fp2int": ("unary", lambda x, o: B.s_fp2int(x), False),
    "div": ("binary", lambda a, b, o: B.s_div(a, b), True),
    "mul_fx": ("binary", lambda a, b, o: B.s_mul_fx(a, b), True),
    "lt": ("binary", lambda a, b, o: B.s_lt(a, b), False),
    "eq": ("binary", lambda a, b, o: B.s_eq(a, b), False),
    "sort": ("list", _sort, True),
    "select": ("list", _select, True),
}


def _parse_values(text):
    if not text:
        raise ConfigError("block runs need --args with comma-separated values")
    try:
        return [Fraction(t.strip()) for t in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse --args {text!r}") from None


def block_program(name: str, values, fmt: FxFormat, opts):
    """``program(E)`` evaluating a single building block on public-size inputs."""
    if name not in BLOCKS:
        raise ConfigError(f"unknown block {name!r}; choose from {', '.join(sorted(BLOCKS))}")
    layout, fn, _ = BLOCKS[name]
    raw = np.array([encode(v, fmt).raw for v in values], dtype=object)
    k = fmt.k
    if layout == "binary":
        if len(raw) % 2:
            raise ConfigError(f"block:{name} takes an even number of values (pairs)")
        a_raw, b_raw = raw[0::2].copy(), raw[1::2].copy()

        def program(E):
            a = E.input(1, a_raw.shape, a_raw, frac=k)
            b = E.input(2, b_raw.shape, b_raw, frac=k)
            return {"y": fn(a, b, opts)}
        return program

    def program(E):
        x = E.input(1, raw.shape, raw, frac=k)
        return {"y": fn(x, opts)}
    return program


# ------------------------------------------------------------------ helpers

def _fmt(args) -> FxFormat:
    return FxFormat.parse(args.format)


def _params(args, T=None) -> PipelineParams:
    hc = None
    if args.f is not None or args.boxes or args.beta is not None:
        f = args.f
        if f is None:
            f = min(len(T.points), 8) if isinstance(T, HCTemplate) else 8
        beta = Fraction(args.beta) if args.beta is not None else Fraction(64)
        if args.boxes:
            boxes = tuple(Fraction(b) for b in args.boxes.split(","))
            hc = HighCurvatureParams(f, args.gamma, beta, boxes)
        elif isinstance(T, HCTemplate):
            hc = HighCurvatureParams.with_default_boxes(f, args.gamma, T.points, beta)
    elif args.gamma != 2 and isinstance(T, HCTemplate):
        hc = HighCurvatureParams.with_default_boxes(min(len(T.points), 8), args.gamma, T.points)
    return PipelineParams(thr=MatchThresholds(args.lam2, args.lam_theta),
                          coord_bits=args.coord_bits, precision=args.precision, hc=hc,
                          mag_bits=args.mag_bits)


def _load_inputs(args):
    if not args.inputs or len(args.inputs) != 2:
        raise ConfigError("pipelines need two --in files: the gallery template, then the probe")
    return [load_template(p) for p in args.inputs]


def _setup(args):
    """(program, protocol label, fx output fields, params record, input record, extras)."""
    fmt = _fmt(args)
    extras = {}
    proto = args.protocol
    if proto.startswith("block:"):
        name = proto.split(":", 1)[1]
        values = _parse_values(args.args)
        prog = block_program(name, values, fmt, args)
        fx = ("y",) if BLOCKS[name][2] else ()
        params = {"format": fmt, "precision": args.precision or "default"}
        if name == "select":
            params["f"] = args.f
        inputs = {"args": args.args}
        return prog, proto, fx, params, inputs, extras
    if proto not in PIPELINES:
        raise ConfigError(f"unknown protocol {proto!r}")
    T, S = _load_inputs(args)
    if proto == "hc" and args.party_id is not None and not args.boxes:
        raise ConfigError("networked hc parties must agree on --boxes; pass them explicitly")
    pp = _params(args, T)
    prog = make_program(proto, T, S, pp, fmt, extras)
    params = {"format": fmt, "lam2": pp.thr.lam2, "lam_theta": pp.thr.lam_theta,
              "coord_bits": pp.coord_bits if pp.coord_bits is not None else "default",
              "precision": pp.precision or "default"}
    if proto == "hc" and pp.hc is not None:
        params.update(f=pp.hc.f, gamma=pp.hc.gamma, beta=pp.hc.beta,
                      boxes=",".join(str(b) for b in pp.hc.boxes))
    if proto == "spectral":
        params["mag_bits"] = pp.mag_bits
    inputs = {"gallery": Path(args.inputs[0]).name, "probe": Path(args.inputs[1]).name}
    return prog, proto, FX_FIELDS[proto], params, inputs, extras


def _outputs(out: dict) -> dict:
    def conv(v):
        if isinstance(v, np.ndarray):
            return v.tolist()
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        return int(v)
    return {k: conv(v) for k, v in out.items()}


def _secure(args, prog):
    fmt = _fmt(args)
    exact = args.trunc == "exact"
    if args.party_id is not None:
        if args.mode != "tcp" or not args.topology:
            raise ConfigError("--party-id needs --mode tcp and --topology")
        topo = read_topology(args.topology)
        cfg = ShamirConfig(n=args.parties, t=args.threshold)
        if len(topo) != cfg.n:
            raise ConfigError(f"topology lists {len(topo)} parties, expected {cfg.n}")
        (out, _), ctx = run_party(args.party_id, cfg, topo, party_program(prog, fmt),
                                  seed=args.seed, fmt=fmt, timeout=args.timeout,
                                  trunc_exact=exact)
        return out, ctx.cost
    topo = read_topology(args.topology) if args.topology else None
    out, h = run_secure(prog, n=args.parties, t=args.threshold, seed=args.seed, fmt=fmt,
                        trunc_exact=exact, mode=args.mode, timeout=args.timeout,
                        topology=topo)
    return out, cost_report(h)


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- commands

def cmd_run(args) -> int:
    prog, proto, fx, params, inputs, _ = _setup(args)
    params = {"parties": args.parties, "threshold": args.threshold, "seed": args.seed,
              "trunc": args.trunc, "mode": args.mode, **params}
    if args.party_id is not None:
        params["party_id"] = args.party_id
    out, cost = _secure(args, prog)
    rec = build_report(proto, params, inputs, _outputs(out), fx, _fmt(args).k, cost)
    _emit(args, format_report(rec))
    return 0


def _compare(sec: dict, ref: dict, fx, exact: bool, tol: Fraction, k: int):
    bad = []

    def walk(name, a, b, is_fx):
        if isinstance(a, list):
            if not isinstance(b, list) or len(a) != len(b):
                bad.append(f"{name}: shape differs")
                return
            for i, (x, y) in enumerate(zip(a, b)):
                walk(f"{name}.{i}", x, y, is_fx)
            return
        if exact or not is_fx:
            if a != b:
                bad.append(f"{name}: secure {a} != plaintext {b}")
        elif abs(Fraction(a - b, 1 << k)) > tol * max(1, abs(Fraction(b, 1 << k))):
            bad.append(f"{name}: secure {a} vs plaintext {b} beyond tolerance")

    for key in ref:
        walk(key, sec.get(key), ref[key], key in fx)
    return bad


def cmd_verify(args) -> int:
    fmt = _fmt(args)
    seeds = range(args.seed, args.seed + args.seeds)
    fails = 0
    for seed in seeds:
        args.seed = seed
        prog, proto, fx, _, _, _ = _setup(args)
        sec, _ = _secure(args, prog)
        sec = _outputs(sec)
        ref = _outputs(run_plain(prog, fmt, seed=seed)[0])
        if args.perturb:
            key = next(iter(ref))
            v = ref[key]
            ref[key] = ([v[0] + 1] + v[1:]) if isinstance(v, list) else v + 1
        bad = _compare(sec, ref, fx, args.trunc == "exact", Fraction(args.tol), fmt.k)
        status = "ok" if not bad else "MISMATCH"
        print(f"verify protocol={proto} seed={seed} trunc={args.trunc} status={status}")
        for b in bad:
            print(f"  {b}")
        fails += bool(bad)
    if fails:
        raise VerifyMismatch(f"{fails} of {len(seeds)} runs disagree with the plaintext oracle")
    return 0


def _bench_cases(args):
    proto = args.protocol
    sizes = [s.strip() for s in args.sweep.split(",") if s.strip()]
    for s in sizes:
        if proto == "spectral":
            try:
                M, Nc = (int(t) for t in s.lower().split("x"))
            except ValueError:
                raise ConfigError(f"spectral sizes look like MxN, got {s!r}") from None
            T, S, _ = synth.planted_spectral(M, Nc, 5, seed=args.seed)
            yield s, T, S
        elif proto == "geom":
            T, S, _ = synth.planted_minutiae(int(s), seed=args.seed, kind="rotate")
            yield s, T, S
        elif proto == "hc":
            m = int(s)
            T, S, _ = synth.planted_hc(m, m + 2, seed=args.seed, kind="translate")
            yield s, T, S
        else:
            raise ConfigError("bench supports the geom, hc and spectral pipelines")


def cmd_bench(args) -> int:
    fmt = _fmt(args)
    rows = []
    for size, T, S in _bench_cases(args):
        prog = make_program(args.protocol, T, S, _params(args, T), fmt, {})
        t0 = time.perf_counter()
        _, cost = _secure(args, prog)
        wall = time.perf_counter() - t0
        rows.append((size, wall, cost.interactive_ops, cost.rounds, cost.bytes_sent))
    head = ("size", "wall_s", "ops", "rounds", "bytes")
    cells = [head] + [(r[0], f"{r[1]:.3f}", str(r[2]), str(r[3]), str(r[4])) for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(head))]
    for c in cells:
        print("  ".join(v.rjust(w) for v, w in zip(c, widths)))
    for r in rows:
        print(f"bench protocol={args.protocol} size={r[0]} trunc={args.trunc} "
              f"wall_s={r[1]:.6f} ops={r[2]} rounds={r[3]} bytes={r[4]}")
    return 0


def cmd_gen(args) -> int:
    prefix = Path(args.prefix)
    sz = [int(t) for t in args.size.lower().replace("x", ",").split(",")]
    if args.kind == "minutiae":
        m = sz[0]
        n = sz[1] if len(sz) > 1 else None
        T, S, truth = synth.planted_minutiae(m, n, seed=args.seed, kind=args.variant or "rotate")
    elif args.kind == "hc":
        m = sz[0]
        mh = sz[1] if len(sz) > 1 else m + 2
        T, S, truth = synth.planted_hc(m, mh, seed=args.seed, kind=args.variant or "translate")
    elif args.kind == "spectral":
        if len(sz) != 2:
            raise ConfigError("spectral sizes look like MxN")
        alpha = int(args.variant) if args.variant else 0
        T, S, truth = synth.planted_spectral(sz[0], sz[1], alpha, seed=args.seed)
    else:
        raise ConfigError(f"unknown kind {args.kind!r}")
    prefix.parent.mkdir(parents=True, exist_ok=True)
    tp, sp = Path(f"{prefix}_T.fpt"), Path(f"{prefix}_S.fpt")
    save_template(T, tp)
    save_template(S, sp)
    print(f"wrote {tp} {sp}")
    print("truth " + " ".join(f"{k}={v}" for k, v in truth.items()))
    return 0


# ------------------------------------------------------------------ parsing

def _common(p):
    p.add_argument("--protocol", required=True,
                   help="geom, hc, spectral or block:<name>")
    p.add_argument("--parties", type=int, default=3)
    p.add_argument("--threshold", type=int, default=1, help="Shamir degree t (2t < n)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", default="56,32", help="fixed-point layout 'ell,k'")
    p.add_argument("--mode", choices=("local", "tcp"), default="local")
    p.add_argument("--topology", help="file of 'id host port' lines")
    p.add_argument("--party-id", type=int, help="run only this party (tcp mode)")
    p.add_argument("--in", dest="inputs", action="append", metavar="FILE",
                   help="template file; give the gallery first, then the probe")
    p.add_argument("--trunc", choices=("exact", "prob"), default="exact")
    p.add_argument("--timeout", type=float, default=120.0, help="per-round timeout (s)")
    p.add_argument("--lam2", type=int, default=9, help="squared distance threshold")
    p.add_argument("--lam-theta", type=int, default=5, help="angle threshold (degrees)")
    p.add_argument("--coord-bits", type=int, help="public coordinate bound")
    p.add_argument("--precision", type=int, help="polynomial table precision (bits)")
    p.add_argument("--f", type=int, help="pairs kept per hc iteration, or rank for block:select")
    p.add_argument("--gamma", type=int, default=2)
    p.add_argument("--beta", help="curvature weight")
    p.add_argument("--boxes", help="comma-separated bounding box sizes")
    p.add_argument("--mag-bits", type=int, default=1)
    p.add_argument("--args", help="comma-separated values for block runs")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oblivfp",
                                 description="Privacy-preserving fingerprint matching.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="run a protocol and write a report")
    _common(p)
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="compare secure outputs with the plaintext oracle")
    _common(p)
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    p.add_argument("--tol", default="1/65536",
                   help="relative tolerance for fixed-point fields under --trunc prob")
    p.add_argument("--perturb", action="store_true",
                   help="negative control: corrupt the oracle output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time a protocol over a size sweep")
    _common(p)
    p.add_argument("--sweep", required=True,
                   help="sizes: 'MxN,...' for spectral, 'm,...' otherwise")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a synthetic gallery/probe pair")
    p.add_argument("--kind", choices=("minutiae", "hc", "spectral"), required=True)
    p.add_argument("--size", required=True, help="'m', 'm,n' or 'MxN'")
    p.add_argument("--variant", help="planted relation, or the shift for spectral")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prefix", required=True, help="output path prefix")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OblivError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
