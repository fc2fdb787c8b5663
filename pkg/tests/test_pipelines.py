from fractions import Fraction

import numpy as np
import pytest

from oblivfp.errors import ConfigError, RangeError
from oblivfp.fingerprint import synth
from oblivfp.fingerprint.pipelines import (PipelineParams, decode_values, run_pipeline,
                                           run_plaintext)
from oblivfp.fingerprint.reference import geom_trans_reference, spectral_search_reference
from oblivfp.fingerprint.types import (HighCurvatureParams, MatchThresholds, Minutia,
                                       MinutiaeTemplate, SpectralTemplate)

from conftest import ONE


def test_synth_is_seed_stable():
    assert synth.gen_minutiae(9, seed=4) == synth.gen_minutiae(9, seed=4)
    assert synth.gen_minutiae(9, seed=4) != synth.gen_minutiae(9, seed=5)
    assert synth.planted_hc(5, 7, seed=2) == synth.planted_hc(5, 7, seed=2)
    assert synth.gen_spectral(3, 4, seed=1) == synth.gen_spectral(3, 4, seed=1)


def test_synth_validates_kind():
    with pytest.raises(ConfigError):
        synth.planted_minutiae(4, kind="mirror")
    with pytest.raises(ConfigError):
        synth.planted_hc(4, 5, kind="rotate")


def test_geom_identity_and_translation():
    T = synth.gen_minutiae(4, seed=0)
    r = run_plaintext("geom", T, T)
    assert (r.values["C_max"], r.values["dtheta"]) == (4, 0)
    assert abs(r.values["dx"]) < 1 << 12 and abs(r.values["dy"]) < 1 << 12
    S = synth.rotate_minutiae(T, 0, shift=(5, 5))
    assert run_plaintext("geom", T, S).values["C_max"] == 4


def test_geom_rotation_about_reference():
    T = synth.gen_minutiae(6, seed=1)
    ref = T.minutiae[2]
    S = synth.rotate_minutiae(T, 7, center=(ref.x, ref.y))
    r = run_plaintext("geom", T, S, PipelineParams(thr=MatchThresholds(9, 5)))
    assert r.values["C_max"] == 6
    assert r.values["dtheta"] == 7


@pytest.mark.parametrize("seed", range(4))
def test_geom_planted_translation_recovered(seed):
    T, S, truth = synth.planted_minutiae(5, seed=seed, kind="translate")
    r = run_plaintext("geom", T, S)
    assert r.values["C_max"] == 5
    dx, dy = Fraction(r.values["dx"], ONE), Fraction(r.values["dy"], ONE)
    assert abs(dx - truth["shift"][0]) < Fraction(1, 1 << 20)
    assert abs(dy - truth["shift"][1]) < Fraction(1, 1 << 20)


@pytest.mark.parametrize("seed", range(6))
def test_geom_matches_brute_force_reference(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 6)), int(rng.integers(1, 6))
    T, S, _ = synth.planted_minutiae(m, n, seed=seed, kind="perturb")
    thr = MatchThresholds(16, 8)
    r = run_plaintext("geom", T, S, PipelineParams(thr=thr))
    assert r.values == geom_trans_reference(T, S, thr)


def test_geom_secure_equals_plaintext():
    T, S, _ = synth.planted_minutiae(4, seed=3, kind="perturb")
    assert run_pipeline("geom", T, S, seed=5).values == run_plaintext("geom", T, S).values


def test_geom_probabilistic_mode_keeps_counts():
    T, S, _ = synth.planted_minutiae(4, seed=8, kind="rotate")
    sec = run_pipeline("geom", T, S, seed=2, trunc_exact=False).values
    ref = run_plaintext("geom", T, S).values
    assert sec["C_max"] == ref["C_max"]
    assert abs(sec["dx"] - ref["dx"]) <= 1 << 12 and abs(sec["dy"] - ref["dy"]) <= 1 << 12


def test_geom_coordinate_range_guard():
    T = MinutiaeTemplate([Minutia(1 << 23, 0, 0)])
    with pytest.raises((ConfigError, RangeError)):
        run_plaintext("geom", T, T)


def test_hc_identity_single_iteration():
    T, _, _ = synth.planted_hc(6, 8, seed=1, kind="identity")
    hp = HighCurvatureParams.with_default_boxes(8, 1, T.points)
    r = run_plaintext("hc", T, T, PipelineParams(hc=hp))
    v = decode_values("hc", r.values)
    R = np.array(v["R"], dtype=float)
    assert np.abs(R - np.eye(3)).max() < 1e-3
    assert max(abs(float(x)) for x in v["v"]) < 1e-3
    assert r.values["C"] == 6


def test_hc_translation_recovered():
    T, S, truth = synth.planted_hc(8, 10, seed=2, kind="translate")
    r = run_plaintext("hc", T, S)
    v = decode_values("hc", r.values)
    assert r.values["C"] == 8
    assert abs(float(v["v"][0]) + truth["shift"][0]) < 1e-3
    assert abs(float(v["v"][1]) + truth["shift"][1]) < 1e-3


def test_hc_requires_points():
    T = synth.gen_minutiae(4)
    with pytest.raises(ConfigError):
        run_plaintext("hc", T, T)


def test_spectral_zero_probe():
    T = synth.gen_spectral(3, 5, seed=0)
    z = np.zeros((3, 5), dtype=object)
    S = SpectralTemplate(z, z.copy(), T.N)
    assert run_plaintext("spectral", T, S).values["C_max"] == 0


@pytest.mark.parametrize("alpha", [-13, 0, 5, 14, -17, 18])
def test_spectral_planted_shift(alpha):
    T, S, _ = synth.planted_spectral(4, 8, alpha, seed=1)
    r = run_plaintext("spectral", T, S)
    assert r.values["alpha_max"] == alpha
    assert r.extras["scores"].count == 8


@pytest.mark.parametrize("seed", range(3))
def test_spectral_secure_equals_plaintext_and_reference(seed):
    T = synth.gen_spectral(3, 6, seed=seed)
    S = synth.gen_spectral(3, 6, seed=seed + 100)
    S = SpectralTemplate(S.a, S.b, T.N)
    ref = spectral_search_reference(T, S)
    plain = run_plaintext("spectral", T, S).values
    assert plain == {"C_max": ref["C_max"], "alpha_max": ref["alpha_max"]}
    assert run_pipeline("spectral", T, S, seed=seed).values == plain


def test_spectral_dimension_mismatch():
    with pytest.raises(ConfigError):
        run_plaintext("spectral", synth.gen_spectral(2, 3), synth.gen_spectral(3, 3))


def test_unknown_pipeline():
    T = synth.gen_minutiae(2)
    with pytest.raises(ConfigError):
        run_plaintext("fft", T, T)
