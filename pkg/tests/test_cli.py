import json

import numpy as np
import pytest

from eotrack.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from eotrack.config import ConfigError, load_pipeline_config
from eotrack.ground import PlaneModel


def write_config(tmp_path, **extra):
    cfg = {
        "seed": 0,
        "profile": "lidar_like",
        "input": "simulate:straight",
        "out_dir": str(tmp_path / "out"),
        "scenario": {"duration": 2.0},
    }
    cfg.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


class TestConfig:
    def test_defaults_per_profile(self, tmp_path):
        cfg = load_pipeline_config(write_config(tmp_path))
        assert cfg.plane_prior == PlaneModel(0.0, 0.0, 1.0, 1.0)
        assert cfg.detection.area.y_max == 2.7
        cam = load_pipeline_config(write_config(tmp_path, profile="camera_like"))
        assert cam.plane_prior == PlaneModel(0.0, 1.0, 0.0, -0.5)
        assert cam.detection.area.z_max == 2.5

    def test_paper_parameter_defaults(self, tmp_path):
        cfg = load_pipeline_config(write_config(tmp_path))
        assert cfg.preselect_margin == 1.0
        assert cfg.voxel_cell == 0.1
        assert cfg.ransac.inlier_threshold == 0.02
        assert cfg.ransac.max_iterations == 100
        assert cfg.ransac.min_inliers == 10
        assert cfg.detection.ground_margin == 0.02
        assert cfg.detection.cost_threshold == 1.0
        assert cfg.detection.dbscan.eps == 0.03
        assert cfg.detection.dbscan.min_points == 30
        assert cfg.gp.signal_std == 0.01
        assert cfg.gp.mean_radius_std == 0.005
        assert cfg.gp.noise_std == 0.001
        assert cfg.gp.length_scale == pytest.approx(np.pi / 6)
        assert cfg.gp.forgetting == 0.001
        assert cfg.gp.num_angles == 10
        assert cfg.motion.accel_noise == 0.05
        assert cfg.motion.meas_noise == 0.1

    def test_invalid_threshold_names_field(self, tmp_path):
        path = write_config(tmp_path, ground={"ransac": {"inlier_threshold": -1.0}})
        with pytest.raises(ConfigError, match="inlier_threshold"):
            load_pipeline_config(path)

    def test_unknown_field_rejected(self, tmp_path):
        path = write_config(tmp_path, detection={"bogus": 1})
        with pytest.raises(ConfigError, match="bogus"):
            load_pipeline_config(path)

    def test_set_override_dotted_path(self, tmp_path):
        path = write_config(tmp_path)
        cfg = load_pipeline_config(path, overrides=["detection.dbscan.eps=0.05", "seed=7"])
        assert cfg.detection.dbscan.eps == 0.05
        assert cfg.seed == 7

    def test_missing_input_dir(self, tmp_path):
        path = write_config(tmp_path, input="does_not_exist")
        with pytest.raises(ConfigError, match="input"):
            load_pipeline_config(path)

    def test_scenario_seed_defaults_to_config_seed(self, tmp_path):
        cfg = load_pipeline_config(write_config(tmp_path), seed=11)
        assert cfg.scenario.seed == 11


class TestCliCommands:
    def test_run_writes_artifacts(self, tmp_path):
        path = write_config(tmp_path)
        assert main(["run", "--config", str(path)]) == EXIT_OK
        out = tmp_path / "out"
        for name in ("plane.json", "detections.jsonl", "track.jsonl", "gt.jsonl", "metrics.json"):
            assert (out / name).is_file(), name
        metrics = json.loads((out / "metrics.json").read_text())
        assert "detection_rate" in metrics["detection"]
        assert "centroid_rmse" in metrics["tracking"]

    def test_logs_align_one_record_per_frame(self, tmp_path):
        path = write_config(tmp_path)
        main(["run", "--config", str(path)])
        out = tmp_path / "out"
        dets = [json.loads(ln) for ln in (out / "detections.jsonl").read_text().splitlines()]
        track = [json.loads(ln) for ln in (out / "track.jsonl").read_text().splitlines()]
        assert len(dets) == len(track) == 9  # 2 s at 4.4 Hz
        assert [d["frame_index"] for d in dets] == list(range(9))
        times = [t["t"] for t in track]
        assert times == sorted(times)

    def test_config_error_exit_code(self, tmp_path, capsys):
        path = write_config(tmp_path, ground={"ransac": {"inlier_threshold": -0.5}})
        assert main(["run", "--config", str(path)]) == EXIT_CONFIG
        assert "inlier_threshold" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["run", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG

    def test_determinism_byte_identical(self, tmp_path):
        path = write_config(tmp_path)
        main(["run", "--config", str(path), "--out", str(tmp_path / "a")])
        main(["run", "--config", str(path), "--out", str(tmp_path / "b")])
        assert (tmp_path / "a/track.jsonl").read_bytes() == (tmp_path / "b/track.jsonl").read_bytes()
        assert (tmp_path / "a/detections.jsonl").read_bytes() == (tmp_path / "b/detections.jsonl").read_bytes()

    def test_init_ground_recovers_plane(self, tmp_path):
        path = write_config(tmp_path)
        assert main(["init-ground", "--config", str(path)]) == EXIT_OK
        plane = json.loads((tmp_path / "out/plane.json").read_text())
        normal = np.asarray(plane[:3])
        angle = np.degrees(np.arccos(np.clip(normal @ [0, 0, 1], -1, 1)))
        assert angle <= 2.0
        assert abs(plane[3] - 1.0) <= 0.02

    def test_init_ground_insufficient_inliers(self, tmp_path, capsys):
        # prior plane far away from any simulated content
        path = write_config(tmp_path, ground={"prior": [0, 0, 1, 30.0]})
        assert main(["init-ground", "--config", str(path)]) == EXIT_RUNTIME

    def test_simulate_then_replay(self, tmp_path):
        path = write_config(tmp_path)
        assert main(["simulate", "--config", str(path), "--out", str(tmp_path / "sim")]) == EXIT_OK
        frames = sorted((tmp_path / "sim/frames").glob("*.pcd"))
        assert len(frames) == 9
        replay_cfg = tmp_path / "replay.json"
        replay_cfg.write_text(json.dumps({
            "seed": 0,
            "profile": "lidar_like",
            "input": str(tmp_path / "sim/frames"),
            "out_dir": str(tmp_path / "replay_out"),
        }))
        assert main(["run", "--config", str(replay_cfg)]) == EXIT_OK
        metrics = json.loads((tmp_path / "replay_out/metrics.json").read_text())
        assert metrics["detection"]["detection_rate"] >= 0.8

    def test_evaluate_matches_run_metrics(self, tmp_path):
        path = write_config(tmp_path)
        main(["run", "--config", str(path)])
        run_metrics = json.loads((tmp_path / "out/metrics.json").read_text())
        assert main([
            "evaluate", "--config", str(path), "--run-dir", str(tmp_path / "out"),
        ]) == EXIT_OK
        eval_metrics = json.loads((tmp_path / "out/metrics.json").read_text())
        assert eval_metrics["detection"]["detection_rate"] == run_metrics["detection"]["detection_rate"]
        assert eval_metrics["tracking"]["centroid_rmse"] == pytest.approx(
            run_metrics["tracking"]["centroid_rmse"], rel=1e-9
        )

    def test_evaluate_missing_artifacts(self, tmp_path, capsys):
        path = write_config(tmp_path)
        assert main(["evaluate", "--config", str(path), "--run-dir", str(tmp_path)]) == EXIT_RUNTIME
