import itertools

import numpy as np
import pytest

from oblivfp import field as F
from oblivfp import shamir
from oblivfp.errors import ConfigError
from oblivfp.prg import XofRng
from oblivfp.shamir import P, ArityError, Share, ShamirConfig, reconstruct, share


def _ints(rng, n):
    return [int(v) for v in rng.integers(0, 1 << 62, size=n)] + [P - 1, 0, 1, P // 2]


def test_field_ops_match_python_ints():
    rng = np.random.default_rng(0)
    a = _ints(rng, 200)
    b = _ints(rng, 200)[::-1]
    a = [(x * 0x9E3779B97F4A7C15 ** 2) % P for x in a]      # spread over all 127 bits
    b = [(x * 0xC2B2AE3D27D4EB4F ** 2) % P for x in b]
    fa, fb = F.from_int(np.array(a, dtype=object)), F.from_int(np.array(b, dtype=object))
    for op, ref in ((F.add, lambda x, y: x + y), (F.sub, lambda x, y: x - y),
                    (F.mul, lambda x, y: x * y)):
        got = F.to_uint(op(fa, fb)).tolist()
        assert got == [ref(x, y) % P for x, y in zip(a, b)]
    inv = F.to_uint(F.mul(fa[:-4], F.inv(fa[:-4]))).tolist()
    assert all(v == 1 for v, x in zip(inv, a) if x)


def test_signed_embedding_roundtrip():
    x = np.array([-5, 0, 7, -(1 << 62), (1 << 62)], dtype=np.int64)
    assert F.to_int(F.from_int(x)).tolist() == x.tolist()
    assert F.to_int(F.from_int(-3)) == -3


def test_share_reconstruct_examples():
    cfg = ShamirConfig(3, 1)
    rng = XofRng(1)
    assert reconstruct(share(42, cfg, rng)) == 42
    assert reconstruct(share(0, cfg, rng)) == 0
    a, b = share(10, cfg, rng), share(-4, cfg, rng)
    lin = [Share(x.party_id, 2 * x.value + y.value, 1) for x, y in zip(a, b)]
    assert reconstruct(lin) == 16


def test_all_subsets_reconstruct():
    cfg = ShamirConfig(5, 2)
    sh = share(123456789, cfg, XofRng(7))
    for sub in itertools.combinations(sh, 3):
        assert reconstruct(sub) == 123456789


def test_share_matches_explicit_polynomial():
    cfg = ShamirConfig(5, 2)
    rng1, rng2 = XofRng("poly"), XofRng("poly")
    sh = share(99, cfg, rng1)
    coefs = [99] + [rng2.getrandbits(127) % P for _ in range(2)]
    for s in sh:
        assert s.value == sum(c * s.party_id ** d for d, c in enumerate(coefs)) % P


def test_arity_errors():
    cfg = ShamirConfig(5, 2)
    sh = share(5, cfg, XofRng(0))
    with pytest.raises(ArityError):
        reconstruct(sh[:2])
    with pytest.raises(ArityError):
        reconstruct([sh[0], sh[0], sh[1]])


def test_config_validation():
    with pytest.raises(ConfigError):
        ShamirConfig(2, 0)
    with pytest.raises(ConfigError):
        ShamirConfig(4, 2)


def test_array_sharing_roundtrip():
    rng = XofRng(3)
    x = F.from_int(np.arange(-50, 50))
    sh = shamir.share_array(x, 5, 2, rng)
    ids = (1, 3, 5)
    got = shamir.reconstruct_array(sh[[i - 1 for i in ids]], ids)
    assert F.to_int(got).tolist() == list(range(-50, 50))


def test_share_wire_roundtrip():
    s = Share(2, P - 3, 1)
    assert Share.from_wire(2, s.wire()) == s


def test_single_share_distribution_independent_of_secret():
    """Any t=1 shares of 0 and of a large secret have the same low-bit histogram."""
    cfg = ShamirConfig(3, 1)
    rng = XofRng("privacy")
    hist = {}
    for secret in (0, (1 << 100) + 12345):
        counts = np.zeros(16)
        for _ in range(10_000):
            counts[share(secret, cfg, rng)[1].value & 15] += 1
        hist[secret] = counts
    a, b = hist.values()
    chi2 = float(((a - b) ** 2 / (a + b)).sum())
    assert chi2 < 50          # 15 dof; the 0.9999 quantile is about 44
