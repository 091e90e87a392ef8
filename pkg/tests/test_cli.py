import math
import subprocess
import sys

import numpy as np
import pytest

from freesum import cli, csvio
from freesum import measures as M
from freesum.errors import ConvergenceError


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    return code, (csvio.read(out) if out.exists() else None)


@pytest.fixture
def laws(tmp_path):
    paths = {}
    for key, m in {"omega": M.Semicircle(), "omega2": M.Semicircle(2.0),
                   "bern": M.Atomic.from_pairs([(-1, 0.5), (1, 0.5)]),
                   "wide": M.dilate(M.Semicircle(), 1.05)}.items():
        paths[key] = tmp_path / f"{key}.txt"
        M.save(m, paths[key])
    return paths


# ---------------------------------------------------------- subcommands

def test_semicircle_table(tmp_path):
    code, (meta, header, rows) = run(tmp_path, "semicircle", "--points", "5", "--seed", "3")
    assert code == 0
    assert header == ["x", "density", "cdf"] and len(rows) == 5
    assert meta["seed"] == "3" and meta["command"] == "semicircle" and "git" in meta
    assert float(rows[2][2]) == pytest.approx(0.5, abs=1e-15)
    assert float(rows[2][1]) == pytest.approx(1 / math.pi, rel=1e-15)


def test_seventeen_digits(tmp_path):
    code, (_, _, rows) = run(tmp_path, "semicircle", "--points", "3")
    assert len(rows[1][1].replace("0.", "").lstrip("0")) == 17


def test_convolve_with_reference(tmp_path, laws):
    save = tmp_path / "sum.txt"
    code, (meta, header, rows) = run(tmp_path, "convolve", "--m1", str(laws["omega"]),
                                     "--m2", str(laws["omega"]), "--reference", str(laws["omega2"]),
                                     "--points", "101", "--save", str(save))
    assert code == 0 and len(rows) == 101
    assert float(meta["delta"]) <= 5e-3
    assert isinstance(M.load(save), M.GridDensity)


def test_clt_series_and_fit(tmp_path):
    code, (meta, header, rows) = run(tmp_path, "clt", "--n", "4,8,16,32", "--resolution", "4096",
                                     "--eta", "1e-3", "--workers", "2")
    assert code == 0 and header == ["n", "delta", "argmax", "seconds"]
    assert [r[0] for r in rows] == ["4", "8", "16", "32"]
    assert -1.5 < float(meta["exponent"]) < 0


def test_bai_breakdown(tmp_path, laws):
    code, (meta, header, rows) = run(tmp_path, "bai", "--mu", str(laws["wide"]), "--nu",
                                     str(laws["omega"]))
    assert code == 0 and len(rows) == 2
    assert all(r[header.index("certified")] == "1" for r in rows)
    assert float(rows[0][header.index("delta")]) == pytest.approx(0.015524, abs=2e-6)


def test_bai_rejects_bad_parameters(tmp_path, laws):
    code, _ = run(tmp_path, "bai", "--mu", str(laws["wide"]), "--nu", str(laws["omega"]),
                  "--a", "1")
    assert code == cli.EXIT_PRECONDITION


def test_gue_selfnorm(tmp_path):
    code, (meta, header, rows) = run(tmp_path, "gue-selfnorm", "--n", "4", "--N", "32",
                                     "--replicas", "3", "--seed", "5")
    assert code == 0 and len(rows) == 3
    assert meta["n"] == "4" and meta["N"] == "32" and meta["seed"] == "5"
    assert all(float(r[2]) <= 2 + 1e-9 for r in rows)


def test_gue_selfnorm_reproducible_across_workers(tmp_path):
    a = run(tmp_path, "gue-selfnorm", "--n", "3", "--N", "16", "--replicas", "4", name="a.csv")[1]
    b = run(tmp_path, "gue-selfnorm", "--n", "3", "--N", "16", "--replicas", "4",
            "--workers", "3", name="b.csv")[1]
    assert a[2] == b[2]


def test_ineq_report(tmp_path):
    code, (meta, header, rows) = run(tmp_path, "ineq", "--n", "3", "--N", "6", "--replicas", "2",
                                     "--family", "random")
    assert code == 0 and len(rows) == 10 and meta["family"] == "random"


def test_ineq_violation_exit_code(tmp_path, monkeypatch):
    import freesum.matrices as mm
    monkeypatch.setattr(mm, "frobenius_bound", lambda S, V2, n: -1.0)
    code, (meta, header, rows) = run(tmp_path, "ineq", "--n", "2", "--N", "4", "--replicas", "1")
    assert code == cli.EXIT_VIOLATION
    # the report is still written before the failure is signalled
    assert len(rows) == 5


def test_rate_fit_series_and_file(tmp_path):
    series = ",".join(f"{n}:{3 * math.log(n) / math.sqrt(n)!r}" for n in (4, 8, 16, 32, 64))
    code, (_, header, rows) = run(tmp_path, "rate-fit", "--series", series, "--with-log", "true")
    assert code == 0
    assert float(rows[0][0]) == pytest.approx(-0.5, abs=1e-8)
    assert float(rows[0][2]) == pytest.approx(3.0, abs=1e-6)
    src = tmp_path / "series.csv"
    csvio.write(src, ["n", "delta"], [(n, n ** -0.5) for n in (4, 8, 16, 32)])
    code, (_, _, rows) = run(tmp_path, "rate-fit", "--input", str(src), name="fit.csv")
    assert code == 0 and float(rows[0][0]) == pytest.approx(-0.5, abs=1e-10)


def test_atoms(tmp_path, laws):
    code, (_, _, rows) = run(tmp_path, "atoms", "--first", "0:0.8,1:0.2",
                             "--second", "0.5:0.7,-1:0.3")
    assert code == 0
    got = {float(a): float(b) for a, b in rows}
    assert got == pytest.approx({-1.0: 0.1, 0.5: 0.5}, abs=1e-15)
    code, (_, _, rows) = run(tmp_path, "atoms", "--first", "0:0.9,1:0.1", "--n", "3", name="n.csv")
    assert [float(rows[0][0]), float(rows[0][1])] == pytest.approx([0.0, 0.7])
    code, (_, _, rows) = run(tmp_path, "atoms", "--first-file", str(laws["bern"]), name="b.csv")
    assert rows == []


# ----------------------------------------------------------- exit codes

def test_exit_precondition(tmp_path):
    code, _ = run(tmp_path, "rate-fit", "--series", "1:1,2:0,3:0.3,4:0.1")
    assert code == cli.EXIT_PRECONDITION


def test_exit_convergence(tmp_path, laws, monkeypatch):
    def fail(*a, **k):
        raise ConvergenceError("stalled")
    monkeypatch.setattr(cli, "free_convolve", fail)
    code, _ = run(tmp_path, "convolve", "--m1", str(laws["bern"]), "--m2", str(laws["bern"]))
    assert code == cli.EXIT_CONVERGENCE


def test_exit_io(tmp_path, capsys):
    code, _ = run(tmp_path, "convolve", "--m1", str(tmp_path / "missing.txt"),
                  "--m2", str(tmp_path / "missing.txt"))
    assert code == cli.EXIT_IO
    assert "I/O or configuration error" in capsys.readouterr().err
    code, _ = run(tmp_path, "convolve")
    assert code == cli.EXIT_IO


# --------------------------------------------------------------- config

def test_config_values_and_precedence(tmp_path):
    conf = tmp_path / "run.cfg"
    conf.write_text("# table settings\nsemicircle.points = 7\nsemicircle.variance = 4\n"
                    "bai.v = 0.05\n")
    code, (meta, _, rows) = run(tmp_path, "semicircle", "--config", str(conf))
    assert code == 0 and len(rows) == 7 and meta["variance"] == "4"
    code, (meta, _, rows) = run(tmp_path, "semicircle", "--config", str(conf), "--points", "3",
                                name="b.csv")
    assert len(rows) == 3 and meta["variance"] == "4"


@pytest.mark.parametrize("text", [
    "semicircle.nope = 1\n",
    "semicircle.points = many\n",
    "points = 3\n",
    "unknown.points = 3\n",
    "semicircle.points = 3\nsemicircle.points = 4\n",
    "bai.variant = sideways\n",
    "semicircle.points\n",
])
def test_config_rejections(tmp_path, text):
    conf = tmp_path / "bad.cfg"
    conf.write_text(text)
    code, _ = run(tmp_path, "semicircle", "--config", str(conf))
    assert code == cli.EXIT_IO


def test_missing_config_file(tmp_path):
    code, _ = run(tmp_path, "semicircle", "--config", str(tmp_path / "none.cfg"))
    assert code == cli.EXIT_IO


# ------------------------------------------------------------- helpers

def test_two_point_law_is_standardized():
    m = cli.two_point_law(0.8)
    assert m.mean == pytest.approx(0.0, abs=1e-15) and m.variance == pytest.approx(1.0)
    assert m.moment(3) != pytest.approx(0.0)


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "freesum.cli", "semicircle", "--points", "3"],
                         capture_output=True, text=True, check=True)
    lines = out.stdout.splitlines()
    assert lines[0].startswith("# command = semicircle")
    assert lines[-4] == "x,density,cdf" and len(lines) == lines.index("x,density,cdf") + 4
