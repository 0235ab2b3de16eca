import json
import shutil
import subprocess

import pytest

from exchange_lattice_plots import cli

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

_TABLE = """\
# exchange-lattice v0.1.0 experiment=reversibility config_hash=x seed=0
beta,alpha,asymmetry
0.25,0.25,0.0
0.25,0.75,1e-16
0.75,0.25,1e-16
0.75,0.75,0.0
# footer {"dim_d": 3.0, "grid_size": 2, "residual": 1e-16}
"""


def _write_spec(tmp_path, payload, table=_TABLE):
    if table is not None:
        (tmp_path / "grid.csv").write_text(table)
    spec = tmp_path / "fig.json"
    spec.write_text(json.dumps(payload))
    return str(spec)


def _last_error(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


def test_render_success(tmp_path, capsys):
    spec = _write_spec(
        tmp_path, {"kind": "heatmap", "input": "grid.csv", "output": "grid.png"}
    )
    assert cli.main(["render", "--spec", spec]) == 0
    # paths resolve against the spec file directory
    out = tmp_path / "grid.png"
    assert str(out) in capsys.readouterr().out
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_missing_spec_file_exits_2(tmp_path, capsys):
    assert cli.main(["render", "--spec", str(tmp_path / "nope.json")]) == 2
    assert _last_error(capsys)["error"] == "config"


def test_unparseable_spec_exits_2(tmp_path, capsys):
    spec = tmp_path / "fig.json"
    spec.write_text("{not json")
    assert cli.main(["render", "--spec", str(spec)]) == 2
    assert "valid JSON" in _last_error(capsys)["message"]


@pytest.mark.parametrize(
    "payload",
    [
        {"kind": "pie", "input": "grid.csv", "output": "x.png"},
        {"kind": "heatmap", "output": "x.png"},
        {"kind": "heatmap", "input": "grid.csv", "output": "x.png", "extra": 1},
        {"kind": "heatmap", "input": "grid.csv", "output": "x.png",
         "options": {"dpi": 10_000}},
        {"kind": "heatmap", "input": "grid.csv", "output": "x.pdf"},
    ],
)
def test_bad_specs_exit_2(tmp_path, capsys, payload):
    spec = _write_spec(tmp_path, payload)
    assert cli.main(["render", "--spec", spec]) == 2
    assert _last_error(capsys)["error"] == "config"


def test_missing_input_exits_2(tmp_path, capsys):
    spec = _write_spec(
        tmp_path,
        {"kind": "heatmap", "input": "absent.csv", "output": "x.png"},
    )
    assert cli.main(["render", "--spec", spec]) == 2
    assert "does not exist" in _last_error(capsys)["message"]


def test_missing_column_exits_2_and_names_it(tmp_path, capsys):
    table = _TABLE.replace("beta,alpha,asymmetry", "beta,alpha,residualz")
    spec = _write_spec(
        tmp_path,
        {"kind": "heatmap", "input": "grid.csv", "output": "x.png"},
        table=table,
    )
    assert cli.main(["render", "--spec", spec]) == 2
    assert "missing column 'asymmetry'" in _last_error(capsys)["message"]


def test_render_crash_exits_3(tmp_path, capsys, monkeypatch):
    spec = _write_spec(
        tmp_path, {"kind": "heatmap", "input": "grid.csv", "output": "x.png"}
    )

    def boom(_):
        raise RuntimeError("synthetic render failure")

    monkeypatch.setattr(cli, "render", boom)
    assert cli.main(["render", "--spec", spec]) == 3
    err = _last_error(capsys)
    assert err["error"] == "runtime"
    assert "synthetic render failure" in err["message"]


def test_console_script_installed(tmp_path):
    exe = shutil.which("plots")
    assert exe is not None
    spec = _write_spec(
        tmp_path, {"kind": "heatmap", "input": "grid.csv", "output": "grid.png"}
    )
    proc = subprocess.run([exe, "render", "--spec", spec], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "grid.png").exists()
