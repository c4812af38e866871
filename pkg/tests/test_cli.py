import json

import pytest

from treecount.cli import main
from treecount.graph import load_edge_list


@pytest.fixture
def files(tmp_path):
    tri = tmp_path / "tri.el"
    tri.write_text("0 1\n1 2\n2 0\n")
    p3 = tmp_path / "p3.el"
    p3.write_text("0 1\n1 2\n")
    return tri, p3


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_count_text(capsys, files):
    tri, p3 = files
    code, out, _ = run(capsys, "count", "--graph", tri, "--template", p3, "--iterations", 2000, "--seed", 1)
    assert code == 0
    fields = dict(tok.split("=") for tok in out.split())
    value, stderr = float(fields["estimate"]), float(fields["stderr"])
    assert abs(value - 3) <= 3 * stderr


def test_count_json(capsys, files):
    tri, p3 = files
    code, out, _ = run(capsys, "count", "--graph", tri, "--template", p3, "--iterations", 20,
                       "--format", "json", "--out", "-")
    data = json.loads(out)
    assert code == 0 and data["iterations"] == 20 and data["automorphisms"] == 2


def test_count_workers_one_matches_default(capsys, files):
    tri, p3 = files
    base = ["count", "--graph", tri, "--template", p3, "--iterations", 50, "--seed", 4]
    _, plain, _ = run(capsys, *base)
    _, one, _ = run(capsys, *base, "--workers", 1)
    assert plain == one


def test_count_workers_reports_messages(capsys, files):
    tri, p3 = files
    code, out, _ = run(capsys, "count", "--graph", tri, "--template", p3, "--workers", 3,
                       "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert [s["rows"] for s in data["exchange"]["halo_steps"]] == [6, 6]


def test_exact(capsys, files):
    tri, p3 = files
    code, out, _ = run(capsys, "exact", "--graph", tri, "--template", p3)
    assert code == 0 and out.strip() == "embeddings=6 occurrences=3"


def test_rmat_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.el", tmp_path / "b.el"
    for path in (a, b):
        assert run(capsys, "rmat", "--scale", 10, "--edges", 4096, "--seed", 7, "--out", path)[0] == 0
    assert a.read_text() == b.read_text()
    g, _ = load_edge_list(a)
    assert g.n == 1024 and 0 < g.m <= 4096


def test_rmat_bad_probabilities_exit_1(capsys, tmp_path):
    code, _, err = run(capsys, "rmat", "--scale", 4, "--edges", 10, "--a", 0.9, "--out", tmp_path / "x")
    assert code == 1 and "sum to 1" in err


def test_bench_csv(capsys, files, tmp_path):
    tri, p3 = files
    out_path = tmp_path / "r.csv"
    code, _, _ = run(capsys, "bench", "--graph", tri, "--template", p3, "--threads", "1,2",
                     "--repeat", 1, "--out", out_path)
    lines = out_path.read_text().splitlines()
    assert code == 0 and lines[0].startswith("threads,wall_seconds") and len(lines) == 3


def test_bench_rejects_descending(capsys, files):
    tri, p3 = files
    code, _, err = run(capsys, "bench", "--graph", tri, "--template", p3, "--threads", "2,1")
    assert code == 2 and "ascending" in err


def test_mem(capsys, files):
    _, p3 = files
    code, out, _ = run(capsys, "mem", "--vertices", 10, "--template", p3, "--format", "json")
    assert code == 0 and json.loads(out)["peak_bytes"] == 720


def test_partition_info(capsys, files):
    _, p3 = files
    code, out, _ = run(capsys, "partition-info", "--template", p3, "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["top"] == 4 and len(data["subtemplates"]) == 5


def test_output_to_file(capsys, files, tmp_path):
    _, p3 = files
    target = tmp_path / "info.txt"
    code, out, _ = run(capsys, "partition-info", "--template", p3, "--out", target)
    assert code == 0 and out == "" and "leaf" in target.read_text()


def test_unknown_flag_exit_2(capsys, files):
    with pytest.raises(SystemExit) as exc:
        main(["count", "--bogus"])
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["count", "--graph", "missing.el", "--template", "p3"],
        ["count", "--graph", "{tri}", "--template", "{p3}", "--iterations", "0"],
        ["count", "--graph", "{tri}", "--template", "{p3}", "--seed", "-1"],
        ["count", "--graph", "{tri}", "--template", "{p3}", "--workers", "4"],
    ],
)
def test_validation_failures_exit_2(capsys, files, argv):
    tri, p3 = files
    argv = [a.format(tri=tri, p3=p3) for a in argv]
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and len(err.strip().splitlines()) == 1


def test_runtime_failure_exit_1(capsys, files, tmp_path):
    tri, _ = files
    bad = tmp_path / "cyc.el"
    bad.write_text("0 1\n1 2\n2 0\n")
    code, _, err = run(capsys, "count", "--graph", tri, "--template", bad)
    assert code == 1 and "cycle" in err


def test_seed_determinism(capsys, files):
    tri, p3 = files
    argv = ["count", "--graph", tri, "--template", p3, "--iterations", 30, "--seed", 9]
    assert run(capsys, *argv) == run(capsys, *argv)
