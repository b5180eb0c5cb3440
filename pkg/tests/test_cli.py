import json

import numpy as np
import pytest

from farsplit.cli import main
from farsplit.farfield import ArcMask, field_from_csv
from farsplit.picard import squared_singular_value
from farsplit.synth import (
    Scene,
    random_modal_component,
    save_scene,
    scene_farfield,
)


@pytest.fixture
def scene_file(grid, rng, tmp_path):
    comps = (
        random_modal_component(rng, (30.0, 0.0), 2.0),
        random_modal_component(rng, (-25.0, 18.0), 1.5),
    )
    scene = Scene(
        k=1.0,
        components=comps,
        grid=grid,
        omega=ArcMask(((1.0, 1.25),)),
        noise_level=0.0,
        noise_seed=0,
    )
    path = tmp_path / "scene.json"
    save_scene(scene, path)
    return path, scene


class TestSynthCommand:
    def test_writes_fields_and_truth(self, scene_file, tmp_path):
        path, scene = scene_file
        out = tmp_path / "out"
        assert main(["synth", str(path), "--out", str(out)]) == 0
        gamma = field_from_csv(out / "gamma.csv")
        assert gamma.grid.size == 512
        expected = scene_farfield(scene)
        assert np.array_equal(gamma.samples, expected.gamma.samples)
        truth = json.loads((out / "truth.json").read_text())
        assert [t["order"] for t in truth] == [3, 3]
        beta = field_from_csv(out / "beta_truth.csv")
        assert np.array_equal(beta.samples, expected.beta_truth.samples)

    def test_byte_identical_reruns(self, scene_file, tmp_path):
        path, _ = scene_file
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["synth", str(path), "--out", str(out_a)]) == 0
        assert main(["synth", str(path), "--out", str(out_b)]) == 0
        for name in ("gamma.csv", "beta_truth.csv", "truth.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_json_format(self, scene_file, tmp_path):
        path, _ = scene_file
        out = tmp_path / "json_out"
        assert main(["synth", str(path), "--out", str(out), "--format", "json"]) == 0
        doc = json.loads((out / "gamma.json").read_text())
        assert doc["grid_size"] == 512


class TestSplitCommands:
    def test_ls_split_and_complete(self, scene_file, tmp_path):
        path, scene = scene_file
        out = tmp_path / "data"
        main(["synth", str(path), "--out", str(out)])
        run = tmp_path / "ls"
        code = main([
            "complete", "--method", "ls",
            "--scene", str(path),
            "--gamma", str(out / "gamma.csv"),
            "--out", str(run),
        ])
        assert code == 0
        solution = json.loads((run / "solution.json").read_text())
        assert solution["method"] == "ls"
        assert solution["condition_number"] > 1.0
        assert len(solution["alphas"]) == 2
        assert (run / "completed.csv").exists()
        assert (run / "component_00.csv").exists()
        # the completed field reproduces the unmasked total on this
        # noiseless, feasible scene
        completed = field_from_csv(run / "completed.csv")
        data = scene_farfield(scene)
        total = data.gamma - data.beta_truth
        assert (completed - total).norm() <= 1e-6 * total.norm()

    def test_l1_complete_restores_arc(self, scene_file, tmp_path):
        path, scene = scene_file
        out = tmp_path / "data"
        main(["synth", str(path), "--out", str(out)])
        run = tmp_path / "l1c"
        code = main([
            "complete", "--method", "l1",
            "--scene", str(path),
            "--gamma", str(out / "gamma.csv"),
            "--out", str(run),
            "--mu", "1e-5", "--iters", "800",
        ])
        assert code == 0
        completed = field_from_csv(run / "completed.csv")
        data = scene_farfield(scene)
        total = data.gamma - data.beta_truth
        assert (completed - total).norm() <= 0.02 * total.norm()

    def test_l1_split_writes_trace(self, scene_file, tmp_path):
        path, _ = scene_file
        out = tmp_path / "data"
        main(["synth", str(path), "--out", str(out)])
        run = tmp_path / "l1"
        code = main([
            "split", "--method", "l1",
            "--scene", str(path),
            "--gamma", str(out / "gamma.csv"),
            "--out", str(run),
            "--mu", "1e-4", "--iters", "300",
        ])
        assert code == 0
        trace = (run / "objective_trace.csv").read_text().splitlines()
        assert trace[0] == "iter,objective,residual"
        objectives = [float(line.split(",")[1]) for line in trace[1:]]
        assert all(b <= a + 1e-12 for a, b in zip(objectives, objectives[1:]))

    def test_singular_geometry_exits_2(self, grid, rng, tmp_path):
        comps = (
            random_modal_component(rng, (0.0, 0.0), 2.0),
            random_modal_component(rng, (1e-9, 0.0), 2.0),
        )
        scene = Scene(k=1.0, components=comps, grid=grid)
        spath = tmp_path / "degenerate.json"
        save_scene(scene, spath)
        out = tmp_path / "data"
        main(["synth", str(spath), "--out", str(out)])
        code = main([
            "split", "--scene", str(spath),
            "--gamma", str(out / "gamma.csv"),
            "--out", str(tmp_path / "run"),
        ])
        assert code == 2

    def test_usage_error_exits_1(self, tmp_path):
        assert main(["split", "--scene", "missing.json", "--gamma", "x.csv"]) == 1
        assert main(["nonsense"]) == 1


class TestAnalyze:
    def test_svd_table(self, tmp_path):
        out = tmp_path / "svd.csv"
        assert main(["analyze", "svd", "--R", "10", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("n,s_n_squared,asymptote")
        first = lines[1].split(",")
        assert int(first[0]) == 0
        assert float(first[1]) == pytest.approx(
            squared_singular_value(0, 10.0), rel=1e-15
        )
        assert float(first[2]) == pytest.approx(20.0, rel=1e-15)

    def test_bounds_table(self, tmp_path):
        geo = {
            "k": 1.0,
            "centers": [[0.0, 0.0], [120.0, 0.0], [0.0, 110.0]],
            "orders": [1, 2, 1],
            "sparsities": [2, 3, 2],
            "omega_measure": 0.05,
            "delta": 0.1,
            "gamma_diff": 0.1,
            "tau": 1.0,
        }
        gpath = tmp_path / "geometry.json"
        gpath.write_text(json.dumps(geo))
        out = tmp_path / "bounds.csv"
        assert main(["analyze", "bounds", "--geometry", str(gpath), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "theorem,feasible,constant"
        names = [line.split(",")[0] for line in lines[1:]]
        assert len(names) == 21
        assert "LS_two" in names and "COND_music" in names


class TestVerify:
    def test_small_run_passes(self, capsys):
        assert main(["verify", "--trials", "40", "--seed", "3"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 8
        assert all(line.startswith("PASS") for line in lines)
