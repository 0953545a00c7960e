import json
import os

import numpy as np
import pytest
from click.testing import CliRunner

from matteforge.cli import main
from matteforge.imaging import save_image_png, save_mask_png
from matteforge.synthetic import disk_scene


@pytest.fixture(scope="module")
def scene(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_scene")
    img, gt, box = disk_scene(140, seed=21)
    path = root / "scene.png"
    save_image_png(img, path)
    return str(path), box, root


def bbox_arg(box):
    return f"{box.x},{box.y},{box.w},{box.h}"


class TestSegmentCommand:
    def test_valid_run_writes_mask(self, scene, tmp_path):
        path, box, _ = scene
        out = tmp_path / "out"
        result = CliRunner().invoke(
            main, ["segment", "--input", path, "--bbox", bbox_arg(box), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert (out / "final_mask.png").exists()

    def test_dump_intermediates(self, scene, tmp_path):
        path, box, _ = scene
        out = tmp_path / "out"
        result = CliRunner().invoke(
            main,
            ["segment", "--input", path, "--bbox", bbox_arg(box), "--out", str(out),
             "--dump-intermediates"],
        )
        assert result.exit_code == 0, result.output
        for name in ("final_mask.png", "matte.png", "trimap.png", "pre_refine_mask.png"):
            assert (out / name).exists()
        manifest = json.loads((out / "candidates" / "manifest.json").read_text())
        assert len(manifest) == 5

    def test_bbox_outside_image_exit_2(self, scene, tmp_path):
        path, _, _ = scene
        result = CliRunner().invoke(
            main,
            ["segment", "--input", path, "--bbox", "0,0,140,140", "--out", str(tmp_path / "o")],
        )
        assert result.exit_code == 2

    def test_malformed_bbox_exit_2(self, scene, tmp_path):
        path, _, _ = scene
        result = CliRunner().invoke(
            main,
            ["segment", "--input", path, "--bbox", "nope", "--out", str(tmp_path / "o")],
        )
        assert result.exit_code == 2

    def test_override_skipped_factor_exit_3(self, scene, tmp_path):
        path, box, _ = scene
        result = CliRunner().invoke(
            main,
            ["segment", "--input", path, "--bbox", bbox_arg(box), "--out",
             str(tmp_path / "o"), "--override-factor", "10"],
        )
        # factor 10 of a 140px scene is a 14px image: always gated
        assert result.exit_code == 3
        assert "selection" in result.output or "InvalidOverride" in result.output

    def test_config_file_and_flag_precedence(self, scene, tmp_path):
        path, box, _ = scene
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text("min-patches: 9999\n")  # would gate everything
        out1 = tmp_path / "o1"
        r1 = CliRunner().invoke(
            main,
            ["segment", "--input", path, "--bbox", bbox_arg(box), "--out", str(out1),
             "--config", str(cfg)],
        )
        assert r1.exit_code == 3  # config applied: no viable candidate
        out2 = tmp_path / "o2"
        r2 = CliRunner().invoke(
            main,
            ["segment", "--input", path, "--bbox", bbox_arg(box), "--out", str(out2),
             "--config", str(cfg), "--min-patches", "8"],
        )
        assert r2.exit_code == 0, r2.output  # flag beats config file

    def test_unknown_config_key_exit_2(self, scene, tmp_path):
        path, box, _ = scene
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text("definitely-not-a-key: 1\n")
        result = CliRunner().invoke(
            main,
            ["segment", "--input", path, "--bbox", bbox_arg(box), "--out",
             str(tmp_path / "o"), "--config", str(cfg)],
        )
        assert result.exit_code == 2


def write_bench_fixture(root, count=2, size=120):
    entries = []
    for i in range(count):
        img, gt, box = disk_scene(size, seed=80 + i)
        save_image_png(img, os.path.join(root, f"b{i}.png"))
        save_mask_png(gt, os.path.join(root, f"b{i}_gt.png"))
        entries.append(
            {"image": f"b{i}.png", "gt": f"b{i}_gt.png", "box": [box.x, box.y, box.w, box.h]}
        )
    manifest = os.path.join(root, "manifest.json")
    with open(manifest, "w") as fh:
        json.dump({"entries": entries}, fh)
    return manifest


class TestBenchCommand:
    def test_fixture_manifest_report(self, tmp_path):
        manifest = write_bench_fixture(tmp_path)
        out = tmp_path / "report"
        result = CliRunner().invoke(
            main,
            ["bench", "--manifest", manifest, "--out", str(out),
             "--strategies", "single_res"],
        )
        assert result.exit_code == 0, result.output
        data = json.loads((out / "report.json").read_text())
        assert len(data["entries"]) == 2
        assert (out / "report.csv").exists()

    def test_filter_cluttered_vacuous_warns(self, tmp_path):
        # smooth scenes: nothing passes the > 300 patch filter
        entries = []
        for i in range(2):
            img = np.full((80, 80, 3), 0.2 + 0.3 * i)
            img[30:50, 30:50] = 0.9 - 0.3 * i
            save_image_png(img, tmp_path / f"s{i}.png")
            save_mask_png(np.zeros((80, 80), bool), tmp_path / f"s{i}_gt.png")
            entries.append(
                {"image": f"s{i}.png", "gt": f"s{i}_gt.png", "box": [25, 25, 30, 30]}
            )
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({"entries": entries}))
        out = tmp_path / "report"
        result = CliRunner().invoke(
            main,
            ["bench", "--manifest", str(manifest), "--out", str(out),
             "--filter-cluttered", "--strategies", "single_res"],
        )
        assert result.exit_code == 0, result.output
        assert "no entry passed" in result.output
        data = json.loads((out / "report.json").read_text())
        assert all(e["cluttered"] is False for e in data["entries"])

    def test_missing_gt_entry_failed_exit_0(self, tmp_path):
        manifest = write_bench_fixture(tmp_path, count=1)
        data = json.loads(open(manifest).read())
        data["entries"].append({"image": "b0.png", "gt": "missing.png", "box": [10, 10, 40, 40]})
        with open(manifest, "w") as fh:
            json.dump(data, fh)
        out = tmp_path / "report"
        result = CliRunner().invoke(
            main,
            ["bench", "--manifest", manifest, "--out", str(out),
             "--strategies", "single_res"],
        )
        assert result.exit_code == 0, result.output
        report = json.loads((out / "report.json").read_text())
        assert report["entries"][1]["error"] is not None

    def test_bad_manifest_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        result = CliRunner().invoke(
            main, ["bench", "--manifest", str(bad), "--out", str(tmp_path / "o")]
        )
        assert result.exit_code == 2


class TestDeterminism:
    def test_byte_identical_runs(self, scene, tmp_path):
        path, box, _ = scene
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            result = CliRunner().invoke(
                main,
                ["segment", "--input", path, "--bbox", bbox_arg(box), "--out", str(out),
                 "--dump-intermediates"],
            )
            assert result.exit_code == 0, result.output
            outs.append(out)
        for name in ("final_mask.png", "matte.png", "trimap.png", "pre_refine_mask.png"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
        m1 = (outs[0] / "candidates" / "manifest.json").read_bytes()
        m2 = (outs[1] / "candidates" / "manifest.json").read_bytes()
        assert m1 == m2
