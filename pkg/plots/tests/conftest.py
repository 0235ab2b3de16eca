"""Shared fixtures: real input tables produced by the simulator CLI.

The renderer only ever sees files, so the fixtures shell out to the installed
``exchange-lattice`` tool once per session and cache the output directories.
Tests that need no real artifacts build tiny synthetic tables instead and run
even when the simulator package is absent.
"""

import json
import shutil
import subprocess

import pytest

REFERENCE_MODEL = {"kernel": {"type": "uniform"}, "rate": {"type": "constant", "lambda": 1.0}}
BETA3_MODEL = {"kernel": {"type": "beta", "d": 3.0}, "rate": {"type": "constant", "lambda": 1.0}}
GG_MODEL = {"kernel": {"type": "gg"}, "rate": {"type": "sqrt_cutoff", "lambda_min": 1.0}}

# schema-identical, reduced-replica versions of the standard experiment runs
_RUNS = {
    "contraction": {
        "experiment": "contraction",
        "model": REFERENCE_MODEL,
        "seed": 3,
        "params": {"n_sites": 8, "n_replicas": 2048, "n_samples": 48},
    },
    "gap_scan": {
        "experiment": "gap_scan",
        "model": BETA3_MODEL,
        "seed": 5,
        "params": {"n_list": [4, 8], "n_replicas": 256, "n_samples": 192},
    },
    "stationarity": {
        "experiment": "stationarity",
        "model": GG_MODEL,
        "seed": 2,
        "params": {"n_sites": 4, "n_replicas": 2048, "horizon": 4.0},
    },
    "stationarity_flat": {
        "experiment": "stationarity",
        "model": BETA3_MODEL,
        "seed": 2,
        "params": {"n_sites": 4, "n_replicas": 1024, "horizon": 3.0},
    },
    "reversibility": {
        "experiment": "reversibility",
        "model": GG_MODEL,
        "seed": 0,
        "params": {"grid_size": 200, "export_grid_size": 48},
    },
}


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    exe = shutil.which("exchange-lattice")
    if exe is None:
        pytest.skip("simulator CLI is not installed")
    root = tmp_path_factory.mktemp("artifacts")
    dirs = {}
    for name, cfg in _RUNS.items():
        out = root / name
        cfg_path = root / f"{name}.json"
        cfg_path.write_text(json.dumps(cfg))
        proc = subprocess.run(
            [exe, "run", str(cfg_path), "--output-dir", str(out)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        dirs[name] = out
    return dirs
