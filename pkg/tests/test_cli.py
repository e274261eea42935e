import json
import subprocess
import sys

import pytest

from engelkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def kv(text: str) -> dict:
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def test_group_info_burnside(capsys):
    code, out, _ = run(capsys, "group", "info", "--name", "burnside3:2", "--format", "kv")
    rec = kv(out)
    assert code == 0
    assert (rec["order"], rec["exponent"], rec["class"]) == ("27", "3", "2")


def test_group_info_text_and_growth(capsys, tmp_path):
    plot = tmp_path / "growth.png"
    code, out, _ = run(capsys, "group", "info", "--name", "heisenberg", "--growth", "3", "--plot", str(plot))
    assert code == 0 and "order" in out and "inf" in out
    assert plot.exists() and plot.stat().st_size > 0


def test_group_build_and_export(capsys, tmp_path):
    target = tmp_path / "b.json"
    code, out, _ = run(capsys, "group", "build", "--name", "burnside3:2", "--out", str(target))
    assert code == 0 and json.loads(target.read_text())["ngens"] == 3
    code, out, _ = run(capsys, "group", "export", "--name", "burnside3:2")
    assert out == target.read_text()
    # the catalog directory serves exported files back
    code, out, _ = run(capsys, "group", "info", "--name", "b", "--catalog-dir", str(tmp_path), "--format", "kv")
    assert code == 0 and kv(out)["order"] == "27"


def test_calc_engel_is_identity(capsys):
    code, out, _ = run(capsys, "calc", "engel", "--name", "burnside3:2", "--x", "a", "--y", "b", "--n", "2",
                       "--format", "kv")
    assert code == 0 and kv(out)["identity"] == "true"


def test_calc_verbs(capsys):
    _, out, _ = run(capsys, "calc", "mul", "--name", "heisenberg", "--x", "b", "--y", "a", "--format", "kv")
    assert kv(out)["identity"] == "false"
    _, out, _ = run(capsys, "calc", "pow", "--name", "burnside3:2", "--x", "ab", "--k", "3", "--format", "kv")
    assert kv(out)["identity"] == "true"
    _, out, _ = run(capsys, "calc", "comm", "--name", "C5", "a", "a", "--format", "kv")
    assert kv(out)["identity"] == "true"


def test_degree_exact_s3(capsys):
    code, out, _ = run(capsys, "degree", "--name", "S3", "--n", "1", "--mode", "exact", "--format", "kv")
    assert code == 0 and kv(out)["degree"] == "1/2"


def test_degree_modes(capsys, tmp_path):
    code, out, _ = run(capsys, "degree", "--name", "Q8", "--mode", "montecarlo", "--samples", "20000",
                       "--seed", "1", "--format", "kv")
    assert code == 0 and abs(float(kv(out)["estimate"]) - 0.625) < 0.02
    plot = tmp_path / "deg.png"
    code, out, _ = run(capsys, "degree", "--name", "S3", "--mode", "ball", "--radius", "3", "--seed", "1",
                       "--plot", str(plot), "--format", "kv")
    assert code == 0 and "exact" in kv(out)["radius3"] and plot.exists()


def test_engel_verbs(capsys, tmp_path):
    code, out, _ = run(capsys, "engel", "check-law", "--name", "burnside3:2", "--law", "engel2_law")
    assert code == 0
    code, out, _ = run(capsys, "engel", "check-law", "--name", "C3wrC3", "--law", "engel2_law", "--format", "kv")
    assert code == 1 and kv(out)["holds"] == "false" and "witness" in kv(out)
    plot = tmp_path / "engel.png"
    code, out, _ = run(capsys, "engel", "classify", "--name", "S3", "--plot", str(plot), "--format", "kv")
    assert code == 0 and int(kv(out)["undetermined"]) > 0 and plot.exists()


def test_solve_verbs(capsys):
    _, out, _ = run(capsys, "solve", "wp", "--name", "burnside3:2", "--word", "a a a", "--format", "kv")
    assert kv(out)["trivial"] == "true"
    _, out, _ = run(capsys, "solve", "power", "--name", "heisenberg", "--x", "a", "--y", "a^5", "--format", "kv")
    assert kv(out)["exponent"] == "5"
    _, out, _ = run(capsys, "solve", "dlp", "--name", "C5", "--x", "a", "--y", "a^3", "--cyclic", "--format", "kv")
    assert kv(out)["exponent"] == "3"
    _, out, _ = run(capsys, "solve", "root", "--name", "D8", "--a", "1", "--n", "2", "--all", "--format", "kv")
    assert kv(out)["count"] == "6"
    _, out, _ = run(capsys, "solve", "geodesic", "--name", "burnside3:2", "--g", "A B a b", "--format", "kv")
    assert kv(out)["length"] == "4"
    _, out, _ = run(capsys, "solve", "member", "--name", "S3", "--h", "b", "--g", "a", "--format", "kv")
    assert kv(out)["member"] == "false"
    _, out, _ = run(capsys, "solve", "conj", "--name", "S3", "a:a", "--format", "kv")
    assert kv(out)["conjugator"] != "none"


def test_exit_codes(capsys):
    assert run(capsys, "group", "info")[0] == 2
    assert run(capsys, "group", "info", "--name", "A5")[0] == 2
    assert run(capsys, "calc", "mul", "--name", "S3", "--x", "q", "--y", "a")[0] == 2
    code, _, err = run(capsys, "degree", "--name", "expquot:2:3:25", "--mode", "exact")
    assert code == 3 and "budget" in err
    code, _, _ = run(capsys, "solve", "dlp", "--name", "C5", "--x", "a", "--y", "a^3", "--cyclic",
                     "--max-memory", "1")
    assert code == 3
    code, _, err = run(capsys, "proto", "mkep", "--name", "burnside3:2", "--users", "3", "--seed", "1")
    assert code == 4


@pytest.mark.parametrize("argv", [
    ["proto", "mkep"],
    ["proto", "lhn"],
    ["degree", "--name", "S3", "--mode", "montecarlo"],
    ["bench", "--name", "S3"],
    ["engel", "check-law", "--name", "S3", "--law", "engel2_law", "--mode", "sampled"],
])
def test_randomized_verbs_need_seed(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "--seed" in err


@pytest.mark.parametrize("argv", [
    ["proto", "mkep", "--seed", "5"],
    ["proto", "sdp", "--seed", "5"],
    ["proto", "eke2", "--seed", "5"],
    ["proto", "sig4", "--seed", "5"],
    ["proto", "sss1", "--seed", "5", "--k", "16"],
    ["proto", "sss2", "--seed", "5", "--prime", "1009"],
    ["proto", "lhn", "--seed", "5", "--count", "50"],
    ["degree", "--name", "S3", "--mode", "montecarlo", "--samples", "2000", "--seed", "5"],
    ["bench", "--name", "burnside3:2", "--ops", "20", "--seed", "5"],
])
def test_seeded_output_is_deterministic(capsys, argv):
    first = run(capsys, *argv, "--format", "kv")
    second = run(capsys, *argv, "--format", "kv")
    assert first[0] == second[0] == 0
    assert first[1] == second[1]


def test_proto_transcript_and_stream(capsys, tmp_path):
    path = tmp_path / "t.bin"
    code, out, _ = run(capsys, "proto", "sdp", "--seed", "3", "--transcript", str(path), "--format", "kv")
    assert code == 0
    rec = kv(out)
    code, out2, _ = run(capsys, "proto", "sdp", "--seed", "3", "--transport", "stream", "--format", "kv")
    assert code == 0 and kv(out2)["transcript_sha256"] == rec["transcript_sha256"]
    assert path.stat().st_size == int(rec["transcript_bytes"])


def test_bench_timings_on_stderr(capsys, tmp_path):
    plot = tmp_path / "bench.png"
    code, out, err = run(capsys, "bench", "--name", "heisenberg", "--ops", "10", "--seed", "1", "--plot", str(plot))
    assert code == 0 and "checksum" in out and "us/op" in err and plot.exists()


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "engelkit.cli", "degree", "--name", "Q8", "--format", "kv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "degree=5/8" in proc.stdout
