import numpy as np
import pytest

from oblivfp import blocks as B
from oblivfp import field as F
from oblivfp.engine import SecureEngine
from oblivfp.errors import DeadlockError, ParseError, ProtocolError
from oblivfp.execute import run_secure
from oblivfp.runtime import cost_report, loopback_topology, read_topology, spawn_parties
from oblivfp.shamir import ShamirConfig


def _open_int(ctx, x):
    _, (o,) = ctx.interact(opens=[(x, "reveal")])
    return F.to_int(o)


def _inp(ctx, owner, vals):
    vals = np.asarray(vals)
    return ctx.input(owner, vals.shape, F.from_int(vals) if ctx.pid == owner else None)


def test_three_party_share_open():
    def prog(ctx):
        x = _inp(ctx, 1, [5])
        return _open_int(ctx, x).tolist()
    h = spawn_parties(ShamirConfig(3, 1), prog, seed=0)
    assert h.outputs == [[5], [5], [5]]


def test_five_party_mul_gate():
    def prog(ctx):
        a, b = _inp(ctx, 1, [3, 0]), _inp(ctx, 4, [4, 77])
        (p,), _ = ctx.interact(mults=[(a, b)])
        return _open_int(ctx, p).tolist()
    h = spawn_parties(ShamirConfig(5, 2), prog, seed=0)
    assert all(o == [12, 0] for o in h.outputs)


def test_random_mul_gates_vs_field_product():
    rng = np.random.default_rng(5)
    a = rng.integers(-(1 << 40), 1 << 40, 100)
    b = rng.integers(-(1 << 40), 1 << 40, 100)

    def prog(ctx):
        (p,), _ = ctx.interact(mults=[(_inp(ctx, 1, a), _inp(ctx, 2, b))])
        return F.to_int(ctx.interact(opens=[(p, "reveal")])[1][0])
    h = spawn_parties(ShamirConfig(3, 1), prog, seed=0)
    assert [int(v) for v in h.outputs[0]] == [int(x) * int(y) for x, y in zip(a, b)]


def test_round_and_op_counting():
    def prog(ctx):
        a = _inp(ctx, 1, np.arange(100))
        (p,), _ = ctx.interact(mults=[(a, a)])
        r1 = ctx.report()
        (q,), _ = ctx.interact(mults=[(p[:1], p[:1])])
        (r,), _ = ctx.interact(mults=[(q, q)])
        return r1, ctx.report()
    h = spawn_parties(ShamirConfig(3, 1), prog, seed=0)
    r1, r2 = h.outputs[0]
    assert (r1.interactive_ops, r1.rounds) == (100, 1)
    assert (r2.interactive_ops - r1.interactive_ops, r2.rounds - r1.rounds) == (2, 2)


def test_linear_program_costs_nothing():
    def prog(E):
        a = E.input(1, (4,), np.arange(4))
        return a * 3 + a
    out, h = run_secure(prog)
    assert out.tolist() == [0, 4, 8, 12]
    rep = cost_report(h)
    assert rep.interactive_ops == 1 * 4 and rep.rounds == 1      # only the output opening


def test_mul_fx_cost_convention():
    def prog(E):
        a, b = E.input(1, (), 3 << 31, frac=32), E.input(2, (), 5 << 30, frac=32)
        return B.s_mul_fx(a, b)
    out, h = run_secure(prog, trunc_exact=False)
    assert out == 15 << 29
    assert cost_report(h).breakdown["s_mul_fx"]["ops"] == 2 * 32 + 2


def test_rand_bits_and_rand_shared():
    def prog(ctx):
        E = SecureEngine(ctx)
        b = E.open(E.rand_bits((10_000,)))
        _, (r,) = ctx.interact(opens=[(ctx.prss_field((4000,)), "reveal")])
        return b, F.to_uint(r)
    h = spawn_parties(ShamirConfig(3, 1), prog, seed=9)
    bits, r = h.outputs[0]
    bits = np.asarray(bits, dtype=np.int64)
    assert set(np.unique(bits)) <= {0, 1}
    assert 0.45 <= bits.mean() <= 0.55
    low = np.array([int(v) & 15 for v in r])
    counts = np.bincount(low, minlength=16)
    exp = len(low) / 16
    assert float(((counts - exp) ** 2 / exp).sum()) < 45


def test_deadlock_detected():
    def prog(ctx):
        if ctx.pid == 3:
            return None
        ctx.interact(opens=[(F.from_int(np.array([1])), "reveal")])
    with pytest.raises(DeadlockError):
        spawn_parties(ShamirConfig(3, 1), prog, seed=0, timeout=1)


def test_mismatched_sizes_raise_protocol_error():
    def prog(ctx):
        size = 2 if ctx.pid == 1 else 3
        ctx.interact(opens=[(F.from_int(np.zeros(size, dtype=np.int64)), "reveal")])
    with pytest.raises(ProtocolError):
        spawn_parties(ShamirConfig(3, 1), prog, seed=0, timeout=5)


def _fx_program(E):
    a = E.input(1, (8,), np.arange(8) << 30, frac=32)
    b = E.input(2, (8,), (np.arange(8) + 3) << 29, frac=32)
    return B.s_div(B.s_mul_fx(a, b) + 1, b)


def test_seeded_runs_are_reproducible():
    o1, h1 = run_secure(_fx_program, seed=11)
    o2, h2 = run_secure(_fx_program, seed=11)
    assert o1.tolist() == o2.tolist()
    assert h1.transcripts == h2.transcripts
    assert cost_report(h1).as_dict() == cost_report(h2).as_dict()


def test_tcp_matches_local():
    o1, h1 = run_secure(_fx_program, seed=4)
    o2, h2 = run_secure(_fx_program, seed=4, mode="tcp", topology=loopback_topology(3))
    assert o1.tolist() == o2.tolist()
    r1, r2 = cost_report(h1), cost_report(h2)
    assert (r1.interactive_ops, r1.rounds) == (r2.interactive_ops, r2.rounds)


def test_read_topology(tmp_path):
    p = tmp_path / "topo.txt"
    p.write_text("# parties\n1 127.0.0.1 9001\n2 127.0.0.1 9002\n3 localhost 9003\n")
    topo = read_topology(p)
    assert topo[3] == ("localhost", 9003)
    p.write_text("1 127.0.0.1 notaport\n")
    with pytest.raises(ParseError):
        read_topology(p)
