import json
import subprocess
import sys

import pytest

from himu.bench import Event, EventScript, generate, save_scripts
from himu.cli import main
from himu.experts import dumps_bundle
from himu.tree import ExpertKind


@pytest.fixture()
def workspace(tmp_path, monkeypatch):
    """Tree + bundle on disk, with the disk cache isolated per test."""
    monkeypatch.setenv("HIMU_CACHE_DIR", str(tmp_path / "cache"))
    script = EventScript(
        script_id="vid-1",
        num_frames=120,
        events=(
            Event(ExpertKind.CLIP, "a red car", (40, 44), amplitude=0.9),
            Event(ExpertKind.ASR, "turn left here", (80, 84)),
        ),
        noise_level=0.02,
        seed=3,
    )
    instance = generate(script)
    bundle_path = tmp_path / "vid-1.bundle.json"
    bundle_path.write_text(dumps_bundle(instance.bundle), encoding="utf-8")
    tree_path = tmp_path / "tree.json"
    tree_path.write_text(
        json.dumps(
            {
                "op": "OR",
                "children": [
                    {"op": "LEAF", "expert": "CLIP", "query": "a red car"},
                    {"op": "LEAF", "expert": "ASR", "query": "turn left here"},
                ],
            }
        ),
        encoding="utf-8",
    )
    return tmp_path, tree_path, bundle_path


def write_tree(tmp_path, obj, name="t.json"):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj), encoding="utf-8")
    return path


def test_validate_ok(workspace, capsys):
    _, tree_path, _ = workspace
    assert main(["validate", "--tree", str(tree_path)]) == 0
    out = capsys.readouterr().out
    assert "valid: depth 2, leaves 2, experts ASR,CLIP" in out


def test_validate_syntax_error_exit_2(tmp_path, capsys):
    path = write_tree(tmp_path, "{not json")
    assert main(["validate", "--tree", str(path)]) == 2
    assert "[syntax]" in capsys.readouterr().err


def test_validate_empty_file_exit_2(tmp_path):
    path = write_tree(tmp_path, "")
    assert main(["validate", "--tree", str(path)]) == 2


def test_validate_schema_error_exit_3(tmp_path, capsys):
    path = write_tree(tmp_path, {"op": "XOR", "children": []})
    assert main(["validate", "--tree", str(path)]) == 3
    assert "[schema]" in capsys.readouterr().err


def test_validate_arity_error_exit_4_with_path(tmp_path, capsys):
    leaf = {"op": "LEAF", "expert": "CLIP", "query": "x"}
    path = write_tree(
        tmp_path, {"op": "RIGHT_AFTER", "children": [leaf, leaf, leaf]}
    )
    assert main(["validate", "--tree", str(path)]) == 4
    err = capsys.readouterr().err
    assert "[arity]" in err and "$" in err


def test_validate_inactive_expert_exit_5(tmp_path, capsys):
    path = write_tree(
        tmp_path,
        {
            "op": "AND",
            "children": [
                {"op": "LEAF", "expert": "CLIP", "query": "x"},
                {"op": "LEAF", "expert": "ASR", "query": "y"},
            ],
        },
    )
    assert main(["validate", "--tree", str(path), "--experts", "clip,ovd"]) == 5
    err = capsys.readouterr().err
    assert "[inactive-expert]" in err and "$.children[1]" in err


def test_missing_file_exit_1(tmp_path, capsys):
    assert main(["validate", "--tree", str(tmp_path / "absent.json")]) == 1
    assert "error" in capsys.readouterr().err


def test_select_writes_consistent_artifacts(workspace, capsys):
    tmp_path, tree_path, bundle_path = workspace
    out_dir = tmp_path / "out"
    code = main(
        ["select", "--tree", str(tree_path), "--bundle", str(bundle_path),
         "--frames", "16", "--out", str(out_dir)]
    )
    assert code == 0
    stdout = capsys.readouterr().out
    assert "selected 16 frames:" in stdout

    selection = json.loads((out_dir / "selection.json").read_text())
    curve = json.loads((out_dir / "curve.json").read_text())
    attribution = json.loads((out_dir / "attribution.json").read_text())
    stats = json.loads((out_dir / "stats.json").read_text())

    assert selection["video_id"] == "vid-1"
    assert selection["budget"] == 16
    assert selection["strategy"] == "pass"
    frames = selection["frames"]
    assert frames == sorted(set(frames)) and len(frames) == 16
    assert [p["frame"] for p in selection["phases"]] == frames
    assert {p["phase"] for p in selection["phases"]} <= {"peak", "neighbor", "fill"}
    assert all(0 <= f < 120 for f in frames)
    # Planted events are found: a selected frame inside each support.
    assert any(40 <= f < 44 for f in frames)
    assert any(80 <= f < 84 for f in frames)

    assert curve["T"] == 120 and len(curve["values"]) == 120
    assert all(0.0 <= v <= 1.0 for v in curve["values"])

    assert attribution["frames"] == frames
    assert [leaf["leaf_id"] for leaf in attribution["leaves"]] == [0, 1]
    assert len(attribution["matrix"]) == 2
    assert all(len(row) == 16 for row in attribution["matrix"])

    assert stats["providers"]["CLIP"] == 1
    assert stats["providers"]["ASR"] == 1
    assert stats["providers"]["OVD"] == 0
    assert stats["cache"]["bundle_ingested"] == 1


def test_select_is_deterministic_byte_for_byte(workspace):
    tmp_path, tree_path, bundle_path = workspace
    outputs = []
    for name in ("run1", "run2"):
        out_dir = tmp_path / name
        assert main(
            ["select", "--tree", str(tree_path), "--bundle", str(bundle_path),
             "--frames", "8", "--out", str(out_dir), "--no-cache"]
        ) == 0
        outputs.append({
            f.name: f.read_bytes() for f in sorted(out_dir.iterdir())
        })
    assert outputs[0] == outputs[1]


def test_select_disk_cache_witness(workspace):
    tmp_path, tree_path, bundle_path = workspace
    args = ["select", "--tree", str(tree_path), "--bundle", str(bundle_path),
            "--frames", "8"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    first = json.loads((tmp_path / "a" / "stats.json").read_text())["cache"]
    second = json.loads((tmp_path / "b" / "stats.json").read_text())["cache"]
    assert first == {"bundle_ingested": 1, "disk_hit": False, "disabled": False}
    assert second == {"bundle_ingested": 0, "disk_hit": True, "disabled": False}


def test_select_strategy_flag(workspace):
    tmp_path, tree_path, bundle_path = workspace
    out_dir = tmp_path / "topk"
    assert main(
        ["select", "--tree", str(tree_path), "--bundle", str(bundle_path),
         "--frames", "4", "--out", str(out_dir), "--strategy", "topk",
         "--no-cache"]
    ) == 0
    selection = json.loads((out_dir / "selection.json").read_text())
    assert selection["strategy"] == "topk"
    assert all(p["phase"] == "fill" for p in selection["phases"])


def test_select_sigma_flag_changes_curve(workspace):
    tmp_path, tree_path, bundle_path = workspace
    curves = {}
    for name, extra in (("default", []), ("wide", ["--sigma-clip", "4.0"])):
        out_dir = tmp_path / name
        assert main(
            ["select", "--tree", str(tree_path), "--bundle", str(bundle_path),
             "--frames", "8", "--out", str(out_dir), "--no-cache", *extra]
        ) == 0
        curves[name] = json.loads((out_dir / "curve.json").read_text())["values"]
    assert curves["default"] != curves["wide"]


def test_config_file_and_flag_precedence(workspace):
    tmp_path, tree_path, _ = workspace
    config_path = tmp_path / "engine.json"
    config_path.write_text(json.dumps({"active_experts": ["CLIP"]}))
    # The file restricts the expert set, so the speech leaf is rejected...
    assert main(
        ["validate", "--tree", str(tree_path), "--config", str(config_path)]
    ) == 5
    # ...unless a flag re-enables it; flags take precedence over the file.
    assert main(
        ["validate", "--tree", str(tree_path), "--config", str(config_path),
         "--experts", "clip,asr"]
    ) == 0


def test_gen_and_bench_commands(tmp_path, capsys):
    scripts = [
        EventScript(
            script_id="g1",
            num_frames=80,
            events=(
                Event(ExpertKind.CLIP, "a dog", (30, 34), amplitude=0.9),
                Event(ExpertKind.OVD, "ball", (50, 54), amplitude=0.8),
            ),
            seed=5,
        )
    ]
    suite = tmp_path / "suite.json"
    save_scripts(scripts, suite)

    gen_dir = tmp_path / "gen"
    assert main(["gen", "--scripts", str(suite), "--out", str(gen_dir)]) == 0
    assert (gen_dir / "g1.bundle.json").is_file()
    assert (gen_dir / "g1.ovd.json").is_file()
    assert json.loads((gen_dir / "g1.tree.json").read_text())["op"] == "OR"

    report_path = tmp_path / "report.json"
    assert main(
        ["bench", "--scripts", str(suite), "--out", str(report_path),
         "--budgets", "4,8", "--selectors", "uniform,pass"]
    ) == 0
    out = capsys.readouterr().out
    assert "recall=" in out
    report = json.loads(report_path.read_text())
    assert {e["selector"] for e in report["entries"]} == {"uniform", "pass"}
    assert main(
        ["bench", "--scripts", str(suite), "--out", str(report_path),
         "--selectors", "sorcery"]
    ) == 1


def test_console_entry_point(workspace):
    _, tree_path, _ = workspace
    proc = subprocess.run(
        [sys.executable, "-m", "himu.cli", "validate", "--tree", str(tree_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "valid:" in proc.stdout
