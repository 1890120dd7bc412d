"""End-to-end tests for the maskbench command line."""
import json

import numpy as np
import pytest

from maskbench.cli import main
from maskbench.complexity import TABLE_COLUMNS
from maskbench.raster import BinaryMask

from helpers import random_gray, random_mask, save_gray_png, save_mask_png, squares_mask


@pytest.fixture
def pair(tmp_path, rng):
    """One crisp perfect prediction/GT pair on disk."""
    mask = random_mask(rng, shape=(32, 32))
    gt = tmp_path / "gt.png"
    pred = tmp_path / "pred.png"
    save_mask_png(gt, mask)
    save_mask_png(pred, mask)
    return str(pred), str(gt)


def notch_pair(tmp_path):
    g = np.zeros((40, 40), dtype=bool)
    g[5:35, 5:35] = True
    p = g.copy()
    p[5:8, 15:21] = False
    gt = tmp_path / "notch_gt.png"
    pred = tmp_path / "notch_pred.png"
    save_mask_png(gt, BinaryMask(g))
    save_mask_png(pred, BinaryMask(p))
    return str(pred), str(gt)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestMetricsCommand:
    def test_perfect_pair(self, pair, capsys):
        pred, gt = pair
        code, doc = run_json(capsys, ["metrics", "--pred", pred, "--gt", gt])
        assert code == 0
        assert doc["schema_version"] == 1
        assert doc["config"] == {"gamma": 5, "epsilon": 2.0, "tau": 0.5, "beta_sq": 0.3}
        assert doc["scores"]["max_f"] == 1.0
        assert doc["scores"]["mae"] == 0.0
        assert doc["hce"]["total"] == 0

    def test_json_only(self, pair, capsys):
        pred, gt = pair
        assert main(["metrics", "--pred", pred, "--gt", gt, "--format", "csv"]) == 2
        assert "json" in capsys.readouterr().err

    def test_out_file(self, pair, tmp_path, capsys):
        pred, gt = pair
        out = tmp_path / "scores.json"
        assert main(["metrics", "--pred", pred, "--gt", gt, "--out", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text())["scores"]["s_measure"] == 1.0

    def test_missing_file(self, tmp_path, capsys):
        missing = str(tmp_path / "nope.png")
        assert main(["metrics", "--pred", missing, "--gt", missing]) == 2
        assert "error" in capsys.readouterr().err


class TestHceCommand:
    def test_single_pair_gamma_zero(self, tmp_path, capsys):
        pred, gt = notch_pair(tmp_path)
        code, doc = run_json(capsys, ["hce", "--pred", pred, "--gt", gt, "--gamma", "0"])
        assert code == 0
        assert doc["config"]["gamma"] == 0
        assert doc["hce"]["fn_boundary_points"] == 2
        assert doc["hce"]["total"] == 2

    def test_relaxation_removes_notch(self, tmp_path, capsys):
        pred, gt = notch_pair(tmp_path)
        code, doc = run_json(capsys, ["hce", "--pred", pred, "--gt", gt, "--gamma", "5"])
        assert code == 0
        assert doc["hce"]["total"] == 0

    def test_directory_mode(self, tmp_path, rng, capsys):
        pred_dir = tmp_path / "pred"
        gt_dir = tmp_path / "gt"
        pred_dir.mkdir()
        gt_dir.mkdir()
        mask = random_mask(rng)
        save_mask_png(gt_dir / "same.png", mask)
        save_mask_png(pred_dir / "same.png", mask)
        g = np.zeros((40, 40), dtype=bool)
        g[5:35, 5:35] = True
        p = g.copy()
        p[5:8, 15:21] = False
        save_mask_png(gt_dir / "notch.png", BinaryMask(g))
        save_mask_png(pred_dir / "notch.png", BinaryMask(p))
        code, doc = run_json(
            capsys, ["hce", "--pred", str(pred_dir), "--gt", str(gt_dir), "--gamma", "0"]
        )
        assert code == 0
        assert [r["id"] for r in doc["records"]] == ["notch", "same"]
        assert doc["records"][0]["total"] == 2
        assert doc["records"][1]["total"] == 0

    def test_mixed_dir_and_file(self, pair, tmp_path, capsys):
        pred, gt = pair
        gt_dir = tmp_path / "gtdir"
        gt_dir.mkdir()
        assert main(["hce", "--pred", pred, "--gt", str(gt_dir)]) == 2
        assert "both" in capsys.readouterr().err


class TestComplexityCommand:
    def test_single_mask_json(self, tmp_path, capsys):
        path = tmp_path / "square.png"
        save_mask_png(path, squares_mask(1))
        code, doc = run_json(capsys, ["complexity", "--gt", str(path)])
        assert code == 0
        assert doc["p_num"] == 4
        assert doc["c_num"] == 1
        assert doc["schema_version"] == 1

    def test_directory_json(self, tmp_path, capsys):
        gt_dir = tmp_path / "gt"
        gt_dir.mkdir()
        for m in (1, 2):
            save_mask_png(gt_dir / f"mask_{m}.png", squares_mask(m))
        code, doc = run_json(capsys, ["complexity", "--gt", str(gt_dir)])
        assert code == 0
        assert doc["dataset"]["i_num"] == 2
        assert [m["id"] for m in doc["masks"]] == ["mask_1", "mask_2"]
        assert doc["masks"][1]["p_num"] == 8

    def test_directory_csv(self, tmp_path, capsys):
        gt_dir = tmp_path / "gt"
        gt_dir.mkdir()
        save_mask_png(gt_dir / "one.png", squares_mask(1))
        assert main(["complexity", "--gt", str(gt_dir), "--format", "csv"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == ",".join(TABLE_COLUMNS)

    def test_single_mask_md(self, tmp_path, capsys):
        path = tmp_path / "square.png"
        save_mask_png(path, squares_mask(1))
        assert main(["complexity", "--gt", str(path), "--format", "md"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("| " + TABLE_COLUMNS[0])


class TestSplitCommand:
    def make_masks(self, tmp_path):
        gt_dir = tmp_path / "gt"
        gt_dir.mkdir()
        for m in range(1, 9):
            save_mask_png(gt_dir / f"mask_{m}.png", squares_mask(m))
        return gt_dir

    def test_end_to_end(self, tmp_path, capsys):
        gt_dir = self.make_masks(tmp_path)
        out_dir = tmp_path / "splits"
        code, doc = run_json(
            capsys, ["split", "--gt", str(gt_dir), "-k", "4", "--out", str(out_dir)]
        )
        assert code == 0
        assert doc["k"] == 4 and doc["total"] == 8
        assert [b["count"] for b in doc["bins"]] == [2, 2, 2, 2]
        scores = [(b["min_score"], b["max_score"]) for b in doc["bins"]]
        assert all(lo <= hi for lo, hi in scores)
        assert all(scores[i][1] <= scores[i + 1][0] for i in range(3))
        for i, expected in enumerate(
            (["mask_1", "mask_2"], ["mask_3", "mask_4"], ["mask_5", "mask_6"], ["mask_7", "mask_8"]),
            start=1,
        ):
            assert (out_dir / f"split_{i}.txt").read_text().splitlines() == expected

    def test_requires_out(self, tmp_path, capsys):
        gt_dir = self.make_masks(tmp_path)
        assert main(["split", "--gt", str(gt_dir), "-k", "2"]) == 2
        assert "--out" in capsys.readouterr().err

    def test_json_only(self, tmp_path, capsys):
        gt_dir = self.make_masks(tmp_path)
        code = main(["split", "--gt", str(gt_dir), "-k", "2", "--format", "md", "--out", str(tmp_path / "s")])
        assert code == 2

    def test_k_too_large(self, tmp_path, capsys):
        gt_dir = tmp_path / "gt"
        gt_dir.mkdir()
        save_mask_png(gt_dir / "only.png", squares_mask(1))
        code = main(["split", "--gt", str(gt_dir), "-k", "5", "--out", str(tmp_path / "s")])
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestReportCommand:
    def make_dataset(self, tmp_path, rng, perfect=True):
        pred_dir = tmp_path / "pred"
        gt_dir = tmp_path / "gt"
        pred_dir.mkdir()
        gt_dir.mkdir()
        for name in ("a", "b", "c"):
            mask = random_mask(rng, shape=(24, 24))
            save_mask_png(gt_dir / f"{name}.png", mask)
            if perfect:
                save_mask_png(pred_dir / f"{name}.png", mask)
            else:
                save_gray_png(pred_dir / f"{name}.png", random_gray(rng, shape=(24, 24)))
        return pred_dir, gt_dir

    def test_directories(self, tmp_path, rng, capsys):
        pred_dir, gt_dir = self.make_dataset(tmp_path, rng)
        code, doc = run_json(capsys, ["report", "--pred", str(pred_dir), "--gt", str(gt_dir)])
        assert code == 0
        assert doc["evaluated"] == 3 and doc["failed"] == 0
        assert doc["aggregate"]["overall"]["max_f"] == 1.0
        assert doc["aggregate"]["overall"]["hce"] == 0.0

    def test_partial_failure_exit_code(self, tmp_path, rng, capsys):
        pred_dir, gt_dir = self.make_dataset(tmp_path, rng)
        (pred_dir / "b.png").write_bytes(b"junk")
        code, doc = run_json(capsys, ["report", "--pred", str(pred_dir), "--gt", str(gt_dir)])
        assert code == 1
        assert doc["failed"] == 1 and doc["evaluated"] == 2

    def test_manifest_input(self, tmp_path, rng, capsys):
        pred_dir, gt_dir = self.make_dataset(tmp_path, rng)
        manifest = {
            "entries": [
                {
                    "id": name,
                    "pred": str(pred_dir / f"{name}.png"),
                    "gt": str(gt_dir / f"{name}.png"),
                    "subset": "va" if name == "a" else "te",
                }
                for name in ("a", "b", "c")
            ]
        }
        mpath = tmp_path / "manifest.json"
        mpath.write_text(json.dumps(manifest))
        code, doc = run_json(capsys, ["report", "--manifest", str(mpath)])
        assert code == 0
        assert set(doc["aggregate"]["subsets"]) == {"va", "te"}
        assert doc["aggregate"]["subsets"]["va"]["count"] == 1

    def test_manifest_conflicts_with_dirs(self, tmp_path, capsys):
        assert main(["report", "--manifest", "m.json", "--pred", "p"]) == 2
        assert "not both" in capsys.readouterr().err

    def test_requires_some_input(self, capsys):
        assert main(["report"]) == 2
        assert "--manifest" in capsys.readouterr().err

    def test_worker_invariance_bytes(self, tmp_path, rng, capsys):
        pred_dir, gt_dir = self.make_dataset(tmp_path, rng, perfect=False)
        outs = []
        for workers in ("1", "2"):
            out = tmp_path / f"report-{workers}.csv"
            code = main(
                [
                    "report",
                    "--pred",
                    str(pred_dir),
                    "--gt",
                    str(gt_dir),
                    "--format",
                    "csv",
                    "--workers",
                    workers,
                    "--out",
                    str(out),
                ]
            )
            assert code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_md_format(self, tmp_path, rng, capsys):
        pred_dir, gt_dir = self.make_dataset(tmp_path, rng)
        assert main(["report", "--pred", str(pred_dir), "--gt", str(gt_dir), "--format", "md"]) == 0
        out = capsys.readouterr().out
        assert "| maxFβ↑ |" in out

    def test_scan_error_exit_code(self, tmp_path, rng, capsys):
        pred_dir, gt_dir = self.make_dataset(tmp_path, rng)
        (pred_dir / "c.png").unlink()
        assert main(["report", "--pred", str(pred_dir), "--gt", str(gt_dir)]) == 2
        assert "prediction" in capsys.readouterr().err.lower()
