"""Config parsing, hashing, manifests, and the CSV formats."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giapop import (ControllerConfig, DoseSchedule, SimConfig, Trajectory,
                    ValidationError, config_hash, parse_config,
                    read_counts_csv, read_experiment_csv, read_schedule_csv,
                    read_trajectory_csv, simulate, write_trajectory_csv)
from giapop.config import DATA_DIR, DEFAULT_CONFIG, RunManifest, write_manifest
from giapop.csvio import TRAJECTORY_HEADER
from conftest import PAPER_MODEL


def _write_config(tmp_path, data, name="config.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def _default_dict():
    return json.loads(DEFAULT_CONFIG.read_text())


class TestParseConfig:
    def test_shipped_default(self):
        cfg = parse_config(DEFAULT_CONFIG)
        for k, v in PAPER_MODEL.items():
            assert getattr(cfg.model, k) == v
        assert cfg.observer.lam == 1.14e-2
        assert cfg.observer.gamma == 1.70e-9
        assert cfg.controller.strategy == "adaptive"
        assert cfg.controller.adaptive.eta == 0.024
        assert cfg.sim.t_end == 60.0
        assert cfg.sim.dt == 0.01
        assert cfg.sim.profile == "paper"
        assert cfg.ranges is None

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.json"
        p.write_text("")
        with pytest.raises(ValidationError,
                           match="missing required section: model"):
            parse_config(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError, match="not found"):
            parse_config(tmp_path / "nope.json")

    def test_malformed_json_reports_position(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{\n  "model": {,}\n}')
        with pytest.raises(ValidationError, match=r"line 2, column"):
            parse_config(p)

    def test_negative_parameter_names_field(self, tmp_path):
        data = _default_dict()
        data["model"]["K"] = -1.0
        with pytest.raises(ValidationError, match="K"):
            parse_config(_write_config(tmp_path, data))

    def test_unknown_model_key(self, tmp_path):
        data = _default_dict()
        data["model"]["carrying_capacity"] = 1.0
        with pytest.raises(ValidationError, match="carrying_capacity"):
            parse_config(_write_config(tmp_path, data))

    def test_unknown_section(self, tmp_path):
        data = _default_dict()
        data["plotting"] = {}
        with pytest.raises(ValidationError, match="plotting"):
            parse_config(_write_config(tmp_path, data))

    def test_bool_is_not_a_number(self, tmp_path):
        data = _default_dict()
        data["model"]["r0"] = True
        with pytest.raises(ValidationError, match=r"model\.r0"):
            parse_config(_write_config(tmp_path, data))

    def test_strategy_override(self, tmp_path):
        p = _write_config(tmp_path, _default_dict())
        cfg = parse_config(p, strategy="zero")
        assert cfg.controller.strategy == "zero"
        assert cfg.controller.adaptive is None

    def test_profile_override(self, tmp_path):
        p = _write_config(tmp_path, _default_dict())
        assert parse_config(p, profile="theorem").sim.profile == "theorem"

    def test_unknown_strategy_override(self, tmp_path):
        p = _write_config(tmp_path, _default_dict())
        with pytest.raises(ValidationError, match="strategy"):
            parse_config(p, strategy="pulsed")

    def test_schedule_resolved_against_config_dir(self, tmp_path):
        sub = tmp_path / "cfgs"
        sub.mkdir()
        (sub / "sched.csv").write_text("t_hours,dose_uM\n0,320\n24,240\n")
        data = _default_dict()
        data["controller"] = {"strategy": "schedule", "schedule_csv": "sched.csv"}
        cfg = parse_config(_write_config(sub, data))
        assert cfg.controller.schedule.segments == ((0.0, 320.0), (24.0, 240.0))

    def test_schedule_missing_everywhere(self, tmp_path):
        data = _default_dict()
        data["controller"] = {"strategy": "schedule"}
        with pytest.raises(ValidationError, match="schedule_csv"):
            parse_config(_write_config(tmp_path, data))

    def test_adaptive_missing_keys_listed(self, tmp_path):
        data = _default_dict()
        del data["controller"]["eta"]
        del data["controller"]["delta"]
        with pytest.raises(ValidationError, match="delta, eta"):
            parse_config(_write_config(tmp_path, data))

    def test_sim_section_may_be_empty(self, tmp_path):
        data = _default_dict()
        data["sim"] = {}
        cfg = parse_config(_write_config(tmp_path, data))
        assert cfg.sim == SimConfig()

    def test_ranges_parsed(self, tmp_path):
        data = _default_dict()
        data["ranges"] = {k: [0.9 * v, 1.1 * v] for k, v in PAPER_MODEL.items()}
        cfg = parse_config(_write_config(tmp_path, data))
        assert cfg.ranges is not None
        assert cfg.ranges.w_m == (0.9 * PAPER_MODEL["w_m"], 1.1 * PAPER_MODEL["w_m"])

    @pytest.mark.parametrize("bad", [[1.0], [1.0, 2.0, 3.0], ["a", 2.0], [True, 2.0], 5.0])
    def test_ranges_must_be_pairs(self, tmp_path, bad):
        data = _default_dict()
        data["ranges"] = {k: [0.9 * v, 1.1 * v] for k, v in PAPER_MODEL.items()}
        data["ranges"]["sigma"] = bad
        with pytest.raises(ValidationError, match=r"ranges\.sigma"):
            parse_config(_write_config(tmp_path, data))


class TestConfigHash:
    def test_whitespace_invariant(self, tmp_path):
        data = _default_dict()
        a = _write_config(tmp_path, data, "a.json")
        b = tmp_path / "b.json"
        b.write_text(json.dumps(data, indent=4, sort_keys=True))
        assert config_hash(a) == config_hash(b)

    def test_value_sensitive(self, tmp_path):
        data = _default_dict()
        a = _write_config(tmp_path, data, "a.json")
        data["controller"]["eta"] = 0.025
        b = _write_config(tmp_path, data, "b.json")
        assert config_hash(a) != config_hash(b)


class TestManifest:
    def test_round_trip(self, tmp_path):
        m = RunManifest(config_path="c.json", profile="paper",
                        warnings=("w1",), outputs=("traj.csv",),
                        tool_version="0.1.0", config_hash="ab" * 32)
        path = tmp_path / "manifest.json"
        write_manifest(m, path)
        loaded = json.loads(path.read_text())
        assert loaded["config_path"] == "c.json"
        assert loaded["warnings"] == ["w1"]
        assert loaded["config_hash"] == "ab" * 32


def _tiny_traj():
    t = np.array([0.0, 0.5])
    return Trajectory(
        t=t,
        x1=np.array([1e5, 12345.6789]),
        x2=np.array([4.8, -0.25]),
        x2_hat=np.array([11.25, 10.0]),
        u=np.array([83.828571428571429, 0.0]),
        r=np.array([0.12, -0.5]),
        envelope=np.array([1e5, math.nan]),
        pi=np.array([16.05, 8.0]))


GOLDEN = (
    "t,x1,x2,x2_hat,u_ugml,u_uM,r,envelope,pi\n"
    "0.00000000e+00,1.00000000e+05,4.80000000e+00,1.12500000e+01,"
    "8.38285714e+01,4.89768429e+02,1.20000000e-01,1.00000000e+05,1.60500000e+01\n"
    "5.00000000e-01,1.23456789e+04,-2.50000000e-01,1.00000000e+01,"
    "0.00000000e+00,0.00000000e+00,-5.00000000e-01,nan,8.00000000e+00\n")


class TestTrajectoryCsv:
    def test_golden_bytes(self, tmp_path):
        # Pins the wire format: '%.8e' fields, derived uM column, literal
        # nan, '\n' newlines.
        path = tmp_path / "traj.csv"
        write_trajectory_csv(_tiny_traj(), path)
        assert path.read_bytes() == GOLDEN.encode()

    def test_read_back(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text(GOLDEN)
        traj = read_trajectory_csv(path)
        assert len(traj) == 2
        assert traj.x1[1] == pytest.approx(12345.6789, rel=1e-8)
        assert math.isnan(traj.envelope[1])
        assert traj.strategy == "from-file"

    def test_empty_trajectory_writes_header_only(self, tmp_path):
        empty = Trajectory(t=np.empty(0), x1=np.empty(0), x2=np.empty(0),
                           x2_hat=np.empty(0), u=np.empty(0), r=np.empty(0),
                           envelope=np.empty(0), pi=np.empty(0))
        path = tmp_path / "empty.csv"
        write_trajectory_csv(empty, path)
        assert path.read_text() == TRAJECTORY_HEADER + "\n"

    def test_write_read_is_a_fixed_point(self, params, observer, tmp_path):
        # One write-read cycle may nudge the derived uM field (it is
        # recomputed from the rounded ug/ml value); a second cycle must
        # reproduce the file byte for byte.
        traj = simulate(params, observer, ControllerConfig(strategy="zero"),
                        SimConfig(t_end=2.0, record_stride=10))
        p1, p2, p3 = (tmp_path / f"t{i}.csv" for i in (1, 2, 3))
        write_trajectory_csv(traj, p1)
        write_trajectory_csv(read_trajectory_csv(p1), p2)
        write_trajectory_csv(read_trajectory_csv(p2), p3)
        assert p2.read_bytes() == p3.read_bytes()

        # Stored columns survive the first cycle exactly at wire precision.
        rows1 = p1.read_text().splitlines()[1:]
        rows2 = p2.read_text().splitlines()[1:]
        for a, b in zip(rows1, rows2):
            fa, fb = a.split(","), b.split(",")
            for j in (0, 1, 2, 3, 4, 6, 7, 8):  # all but the derived uM field
                assert fa[j] == fb[j]

    @given(x=st.floats(min_value=-1e12, max_value=1e12, allow_nan=False,
                       allow_infinity=False, allow_subnormal=False))
    @settings(max_examples=300, deadline=None)
    def test_wire_format_idempotent(self, x):
        s = "%.8e" % x
        assert "%.8e" % float(s) == s

    def test_header_mismatch(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,pop\n0,1\n")
        with pytest.raises(ValidationError, match="header"):
            read_trajectory_csv(path)

    def test_field_count_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(TRAJECTORY_HEADER + "\n1,2,3\n")
        with pytest.raises(ValidationError, match=r"bad\.csv:2"):
            read_trajectory_csv(path)

    def test_non_numeric_reports_line(self, tmp_path):
        good = "0,1,2,3,4,5,6,7,8"
        path = tmp_path / "bad.csv"
        path.write_text(TRAJECTORY_HEADER + "\n" + good + "\n" +
                        good.replace("4", "x") + "\n")
        with pytest.raises(ValidationError, match=r"bad\.csv:3"):
            read_trajectory_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError, match="not found"):
            read_trajectory_csv(tmp_path / "nope.csv")


class TestExperimentCsv:
    def test_shipped_schedules(self):
        expected = {
            1: ((0.0, 320.0), (24.0, 240.0), (48.0, 180.0)),
            2: ((0.0, 320.0), (24.0, 240.0), (48.0, 160.0)),
            3: ((0.0, 320.0), (24.0, 160.0), (48.0, 80.0)),
            4: ((0.0, 320.0), (24.0, 80.0), (48.0, 40.0)),
        }
        for i, segs in expected.items():
            sched = read_schedule_csv(DATA_DIR / f"table1_exp{i}.csv")
            assert isinstance(sched, DoseSchedule)
            assert sched.segments == segs

    def test_counts_file(self, tmp_path):
        p = tmp_path / "counts.csv"
        p.write_text("t_hours,value\n0,1e5\n24,2e4\n")
        assert read_experiment_csv(p) == [(0.0, 1e5), (24.0, 2e4)]

    def test_decreasing_time_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("t_hours,value\n0,1\n24,2\n24,3\n")
        with pytest.raises(ValidationError, match=r"bad\.csv:4"):
            read_experiment_csv(p)

    def test_unknown_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("hours,dose\n0,1\n")
        with pytest.raises(ValidationError, match="header"):
            read_experiment_csv(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(ValidationError, match="empty"):
            read_experiment_csv(p)

    def test_non_numeric_reports_line(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("t_hours,value\n0,one\n")
        with pytest.raises(ValidationError, match=r"bad\.csv:2"):
            read_experiment_csv(p)

    def test_typed_wrappers_reject_wrong_kind(self, tmp_path):
        counts = tmp_path / "counts.csv"
        counts.write_text("t_hours,value\n0,1e5\n")
        sched = tmp_path / "sched.csv"
        sched.write_text("t_hours,dose_uM\n0,320\n")
        with pytest.raises(ValidationError, match="counts"):
            read_schedule_csv(counts)
        with pytest.raises(ValidationError, match="schedule"):
            read_counts_csv(sched)
