import subprocess
import sys

import pytest

from oblivfp.cli import main
from oblivfp.report import parse_report
from oblivfp.runtime import loopback_topology


@pytest.fixture
def spectral_pair(tmp_path):
    assert main(["gen", "--kind", "spectral", "--size", "4x8", "--variant", "5",
                 "--prefix", str(tmp_path / "sp")]) == 0
    return [str(tmp_path / "sp_T.fpt"), str(tmp_path / "sp_S.fpt")]


def _ins(pair):
    return ["--in", pair[0], "--in", pair[1]]


def test_run_spectral_report_is_reproducible(tmp_path, spectral_pair):
    out1, out2 = tmp_path / "r1.txt", tmp_path / "r2.txt"
    for out in (out1, out2):
        assert main(["run", "--protocol", "spectral", *_ins(spectral_pair), "--seed", "3",
                     "--out", str(out)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    rec = parse_report(out1.read_text())
    assert rec["output.alpha_max"] == "5"
    for key in ("output.C_max", "output.C_max.raw", "cost.ops", "cost.rounds", "cost.bytes"):
        assert key in rec


def test_two_parties_is_config_error(spectral_pair, capsys):
    assert main(["run", "--protocol", "spectral", *_ins(spectral_pair), "--parties", "2"]) == 2
    assert "at least 3 parties" in capsys.readouterr().err


def test_verify_passes_and_negative_control_fails(spectral_pair, capsys):
    assert main(["verify", "--protocol", "spectral", *_ins(spectral_pair), "--seeds", "2"]) == 0
    assert capsys.readouterr().out.count("status=ok") == 2
    assert main(["verify", "--protocol", "spectral", *_ins(spectral_pair), "--perturb"]) == 9
    assert "MISMATCH" in capsys.readouterr().out


def test_verify_identity_geom(tmp_path, capsys):
    main(["gen", "--kind", "minutiae", "--size", "4", "--variant", "identity",
          "--prefix", str(tmp_path / "m")])
    assert main(["verify", "--protocol", "geom", "--in", str(tmp_path / "m_T.fpt"),
                 "--in", str(tmp_path / "m_S.fpt")]) == 0


def test_verify_probabilistic_mode(tmp_path):
    main(["gen", "--kind", "hc", "--size", "6", "--prefix", str(tmp_path / "h")])
    assert main(["verify", "--protocol", "hc", "--trunc", "prob", "--in", str(tmp_path / "h_T.fpt"),
                 "--in", str(tmp_path / "h_S.fpt")]) == 0


def test_block_runs(capsys):
    assert main(["run", "--protocol", "block:div", "--args", "1,4"]) == 0
    rec = parse_report(capsys.readouterr().out)
    assert abs(float(rec["output.y.0"]) - 0.25) < 2 ** -30
    assert main(["run", "--protocol", "block:select", "--args", "5,1,9,3,7", "--f", "3"]) == 0
    assert parse_report(capsys.readouterr().out)["output.y"] == "5"
    assert main(["run", "--protocol", "block:lt", "--args", "3,5,5,5"]) == 0
    rec = parse_report(capsys.readouterr().out)
    assert (rec["output.y.0"], rec["output.y.1"]) == ("1", "0")
    assert main(["verify", "--protocol", "block:sqrt", "--args", "2,0.25"]) == 0


def test_block_errors(capsys):
    assert main(["run", "--protocol", "block:nope", "--args", "1"]) == 2
    assert main(["run", "--protocol", "block:div", "--args", "1,2,3"]) == 2
    assert main(["run", "--protocol", "block:sin"]) == 2


def test_bad_template_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.fpt"
    p.write_text("FPT v1 minutiae 1\n1 2 360\n")
    assert main(["run", "--protocol", "geom", "--in", str(p), "--in", str(p)]) == 3
    assert "line 2" in capsys.readouterr().err


def test_bench_prints_table_and_records(capsys):
    assert main(["bench", "--protocol", "spectral", "--sweep", "3x6,3x8"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].split() == ["size", "wall_s", "ops", "rounds", "bytes"]
    recs = [line for line in out if line.startswith("bench ")]
    assert len(recs) == 2
    rounds = [dict(kv.split("=") for kv in r.split()[1:])["rounds"] for r in recs]
    assert rounds[0] == rounds[1]


def test_tcp_party_mode_joins_and_completes(tmp_path, spectral_pair):
    topo = loopback_topology(3)
    tf = tmp_path / "topo.txt"
    tf.write_text("".join(f"{pid} {h} {p}\n" for pid, (h, p) in topo.items()))
    procs = [subprocess.Popen([sys.executable, "-m", "oblivfp.cli", "run", "--protocol", "spectral",
                               *_ins(spectral_pair), "--mode", "tcp", "--topology", str(tf),
                               "--party-id", str(pid), "--out", str(tmp_path / f"p{pid}.txt")],
                              stderr=subprocess.PIPE)
             for pid in (1, 2, 3)]
    for p in procs:
        _, err = p.communicate(timeout=120)
        assert p.returncode == 0, err.decode()
    recs = [parse_report((tmp_path / f"p{pid}.txt").read_text()) for pid in (1, 2, 3)]
    outs = [{k: v for k, v in r.items() if k.startswith(("output.", "cost.ops", "cost.rounds"))}
            for r in recs]
    assert outs[0] == outs[1] == outs[2]
    assert recs[0]["output.alpha_max"] == "5"


def test_party_id_requires_tcp(spectral_pair):
    assert main(["run", "--protocol", "spectral", *_ins(spectral_pair), "--party-id", "1"]) == 2
