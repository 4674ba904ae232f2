import json
import subprocess
import sys

import pytest

from curvem.cli import main, thresholds
from curvem.geometry import Edge, Element, Mesh, mesh_read, mesh_write
from conftest import FIXTURES


def test_mesh_disk(tmp_path, capsys):
    out = tmp_path / "disk.json"
    assert main(["mesh", "disk", "--rings", "2", "--sectors", "8", "--out", str(out)]) == 0
    assert mesh_read(out).n_elements == 16
    assert "16 elements" in capsys.readouterr().out


def test_mesh_sine(tmp_path):
    out = tmp_path / "sine.json"
    assert main(["mesh", "sine", "--n", "4", "--out", str(out)]) == 0
    mesh = mesh_read(out)
    assert mesh.n_elements == 16
    assert sum(e.curved for e in mesh.edges) == 8


def test_mesh_interface_kappa(tmp_path):
    out = tmp_path / "iface.json"
    assert main(["mesh", "disk", "--rings", "4", "--sectors", "16", "--interface",
                 "--out", str(out)]) == 0
    kappas = {el["kappa"] for el in json.loads(out.read_text())["elements"]}
    assert kappas == {1.0, 5.0}


def test_mesh_from_voronoi_square(tmp_path):
    out = tmp_path / "vor.json"
    assert main(["mesh", "sine", "--square-mesh", str(FIXTURES / "voronoi_16.json"),
                 "--straight", "--out", str(out)]) == 0
    mesh = mesh_read(out)
    assert mesh.n_elements == 16 and not any(e.curved for e in mesh.edges)


@pytest.mark.parametrize("argv", [
    ["mesh", "disk", "--rings", "0", "--out", "x.json"],
    ["mesh", "disk", "--rings", "3", "--interface", "--out", "x.json"],
    ["mesh", "sine", "--n", "0", "--out", "x.json"],
    ["solve", "--k", "9"],
    ["solve", "--k", "two"],
    ["convergence", "--levels", "2"],
    ["solve", "--mesh-file", "does-not-exist.json"],
])
def test_usage_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as err:
        main(["solve", "--solver", "lu"])
    assert err.value.code == 2


def test_solve_prints_error_line(tmp_path, capsys):
    out = tmp_path / "sol.csv"
    assert main(["solve", "--case", "disk-u1", "--k", "2", "--out", str(out)]) == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("case=disk-u1 k=2 h=") and "E_H1=" in line and "E_L2=" in line
    rows = out.read_text().splitlines()
    assert rows[0] == "dof_id,value" and len(rows) > 1


def test_solve_constant_reproduced(capsys):
    assert main(["solve", "--case", "constant", "--value", "1", "--k", "3", "--level", "1"]) == 0
    fields = dict(kv.split("=") for kv in capsys.readouterr().out.split())
    assert float(fields["E_H1"]) <= 1e-10


def test_solve_interface(capsys):
    assert main(["solve", "--case", "interface-u3", "--k", "2", "--solver", "cg"]) == 0
    assert "case=interface-u3" in capsys.readouterr().out


def test_conditioning_failure_exits_1(tmp_path, capsys):
    path = tmp_path / "sliver.json"
    v = [[0, 0], [1, 0], [1, 1e-12], [0, 1e-12]]
    mesh = Mesh(v, [Edge((0, 1)), Edge((1, 2)), Edge((2, 3)), Edge((3, 0))],
                [Element((1, 2, 3, 4))])
    mesh_write(mesh, path)
    assert main(["solve", "--case", "sine-u2", "--k", "3", "--mesh-file", str(path)]) == 1
    assert "solver failure" in capsys.readouterr().err


def test_convergence_check_passes_and_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["convergence", "--case", "disk-u1", "--k", "1,2", "--levels", "3", "--check"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "k,mesh_family,level,h,ndofs,EH1,EL2,slope_H1,slope_L2"
    assert len(lines) == 7
    assert capsys.readouterr().err.count(" ok\n") == 4


def test_convergence_check_violation_exits_3(capsys):
    # k=1 on chord meshes sits below the straight-approximation H1 window
    argv = ["convergence", "--case", "straight-approx-u2", "--k", "1", "--levels", "3",
            "--check"]
    assert main(argv) == 3
    captured = capsys.readouterr()
    assert "FAIL" in captured.err
    assert captured.out.startswith("k,mesh_family")
    assert main(argv[:-1]) == 0


def test_convergence_from_mesh_files(tmp_path, capsys):
    files = []
    for n in (2, 4, 8):
        path = tmp_path / f"q{n}.json"
        main(["mesh", "sine", "--n", str(n), "--out", str(path)])
        files += ["--mesh-file", str(path)]
    capsys.readouterr()
    assert main(["convergence", "--case", "sine-u2", "--k", "2", *files]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[1].startswith("2,file,0,")


def test_thresholds():
    assert thresholds("disk-u1", 3).violations({"H1": 2.9, "L2": 3.8}) == []
    assert len(thresholds("disk-u1", 3).violations({"H1": 2.8, "L2": 3.7})) == 2
    assert thresholds("straight-approx-u2", 3).violations({"H1": 1.5, "L2": 2.0}) == []
    assert thresholds("straight-approx-u2", 3).violations({"H1": 2.2, "L2": 2.0})


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.json"
    proc = subprocess.run([sys.executable, "-m", "curvem", "mesh", "disk", "--rings", "1",
                           "--sectors", "4", "--out", str(out)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert mesh_read(out).n_elements == 4
