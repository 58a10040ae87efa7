"""Real trajectory CSVs for the figure tests.

The simulator is driven through its CLI only: this package's contract
is the CSV format, so the tests consume exactly that surface.
"""

import json
import shutil
import subprocess

import pytest

GIAPOP = shutil.which("giapop")

# published parameter study values, restated here so the open-loop run
# can be configured without reaching into the simulator package
OPEN_LOOP_CONFIG = {
    "model": {"r0": 0.179527, "K": 6.596e7, "beta_d": 0.00874109,
              "beta_m": 0.04162605, "w_m": 45.8677, "sigma": 0.52947229225},
    "observer": {"lambda": 1.14e-2, "gamma": 1.70e-9},
    "controller": {"strategy": "zero"},
    "sim": {"t_end": 200.0, "dt": 0.01, "record_stride": 10,
            "x1_0": 1e5, "x2_0": 4.80, "x2_hat_0": 11.25},
}


def _simulate(out_dir, *extra):
    r = subprocess.run([GIAPOP, "simulate", "--out", str(out_dir), *extra],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    return r


@pytest.fixture(scope="session")
def runs(tmp_path_factory):
    if GIAPOP is None:
        pytest.skip("giapop CLI not installed")
    root = tmp_path_factory.mktemp("runs")
    _simulate(root)
    _simulate(root, "--strategy", "constant")
    cfg = root / "open_loop.json"
    cfg.write_text(json.dumps(OPEN_LOOP_CONFIG))
    _simulate(root, "--config", str(cfg))
    return {
        "adaptive": root / "trajectory_adaptive_paper.csv",
        "constant": root / "trajectory_constant_paper.csv",
        "open": root / "trajectory_zero_paper.csv",
    }
