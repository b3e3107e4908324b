import json

import pytest

from slatepoet.analytics import SessionRecord, append_record
from slatepoet.backends import StubBackend
from slatepoet.chains import run_chain
from slatepoet.cli import main
from slatepoet.config import load_config, parse_kv_file
from slatepoet.geometry import GeometryConfig
from slatepoet.layoutfile import save_layout, save_poses
from slatepoet.simulate import NoiseModel, generate_grid, synthesize
from slatepoet.vocabulary import Mode


# ---------------------------------------------------------------------------
# config file parsing
# ---------------------------------------------------------------------------


def test_parse_kv_file(tmp_path):
    path = tmp_path / "slate.conf"
    path.write_text(
        "# a comment\n"
        "k = 1000\n"
        'backend_model = "gpt-4"\n'
        "settle_ms = 2500  # trailing comment\n"
        "\n"
        "multi_session = true\n"
    )
    values = parse_kv_file(path)
    assert values == {
        "k": "1000",
        "backend_model": "gpt-4",
        "settle_ms": "2500",
        "multi_session": "true",
    }


def test_load_config_full(tmp_path):
    path = tmp_path / "slate.conf"
    path.write_text(
        "k = 800\n"
        "tile_height = 25\n"
        "settle_ms = 2000\n"
        "move_epsilon = 6\n"
        "backend = http\n"
        "backend_model = local-model\n"
        "backend_timeout_ms = 5000\n"
        "credential_env = MY_KEY\n"
        "log_path = none\n"
        "port = 9000\n"
    )
    config = load_config(path)
    assert config.geometry == GeometryConfig(k=800.0, tile_height=25.0)
    assert config.settle_ms == 2000
    assert config.move_epsilon == 6.0
    assert config.backend == "http"
    assert config.backend_config.model == "local-model"
    assert config.backend_config.timeout_ms == 5000
    assert config.backend_config.credential_env == "MY_KEY"
    assert config.log_path is None
    assert config.port == 9000


def test_load_config_defaults(tmp_path):
    path = tmp_path / "empty.conf"
    path.write_text("")
    config = load_config(path)
    assert config.geometry.tile_height == "auto"
    assert config.settle_ms == 3000
    assert config.backend == "stub"


def test_malformed_config_line(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("this is not a key value line\n")
    with pytest.raises(ValueError):
        load_config(path)


# ---------------------------------------------------------------------------
# CLI commands
# ---------------------------------------------------------------------------


def make_layout_file(tmp_path, rows=3, cols=3):
    words = [
        "hate", "delicious", "body",
        "beautiful", "anxious", "heart",
        "slow", "broken", "heaven",
    ][: rows * cols]
    poses = generate_grid(rows, cols, (100.0, 70.0), word_ids=words)
    snapshot = synthesize(poses, NoiseModel())
    path = tmp_path / "scene.layout.json"
    save_layout(path, snapshot.detections, GeometryConfig())
    return path, words


def test_order_prints_reading_ordered_text(tmp_path, capsys):
    path, words = make_layout_file(tmp_path)
    assert main(["order", str(path)]) == 0
    out = capsys.readouterr().out
    assert out == "hate delicious body\nbeautiful anxious heart\nslow broken heaven\n"


def test_order_ids_flag(tmp_path, capsys):
    path, words = make_layout_file(tmp_path, rows=1, cols=3)
    assert main(["order", str(path), "--ids"]) == 0
    assert capsys.readouterr().out == "hate delicious body\n"


def test_order_missing_file_fails(tmp_path, capsys):
    assert main(["order", str(tmp_path / "nope.json")]) != 0
    assert "order" in capsys.readouterr().err


def test_simulate_from_pose_file(tmp_path, capsys):
    pose_path = tmp_path / "poses.json"
    save_poses(pose_path, generate_grid(1, 2, 100.0, word_ids=["human", "memory"]))
    out_path = tmp_path / "scene.layout.json"
    assert main(["simulate", str(pose_path), "-o", str(out_path)]) == 0
    assert main(["order", str(out_path)]) == 0
    out = capsys.readouterr().out
    assert out.endswith("human memory\n")


def test_simulate_grid_to_stdout(tmp_path, capsys):
    assert main(["simulate", "--grid", "2x2", "--spacing", "100,80"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["format_version"] == 1
    assert len(doc["markers"]) == 4


def test_simulate_baseline_with_noise_is_seeded(tmp_path, capsys):
    args = ["simulate", "--baseline", "3:30", "--spacing", "90",
            "--sigma", "1.0", "--seed", "5"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_simulate_needs_a_source(capsys):
    assert main(["simulate"]) == 2
    assert "pose file" in capsys.readouterr().err


def test_stats_report(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    for i, mode in enumerate([Mode.COLLABORATE, Mode.COLLABORATE, Mode.IDEATE]):
        append_record(
            log,
            SessionRecord(
                ts_ms=i, mode=mode, poem_text="human memory",
                word_ids=("human", "memory"), stage1_text="s1",
                stage2_text="the answer here", latency_ms=1.0,
            ),
        )
    assert main(["stats", str(log)]) == 0
    out = capsys.readouterr().out
    assert "poems: 3" in out
    assert "collaborate: 67%" in out
    assert "ideate: 33%" in out
    assert "vocabulary coverage: 2/175" in out


def test_stats_reports_corrupt_lines_on_stderr(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    append_record(
        log,
        SessionRecord(ts_ms=0, mode=Mode.IDEATE, poem_text="human",
                      word_ids=("human",), stage1_text="a", stage2_text="b"),
    )
    with open(log, "a") as fh:
        fh.write("garbage\n")
    assert main(["stats", str(log)]) == 0
    captured = capsys.readouterr()
    assert "line 2" in captured.err
    assert "poems: 1" in captured.out


def test_replay_matches_stub_generated_log(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    stub = StubBackend()
    for i, (mode, poem) in enumerate([(Mode.IDEATE, "slow heaven"), (Mode.ANALOGY, "human")]):
        result = run_chain(mode, poem, stub)
        append_record(
            log,
            SessionRecord(ts_ms=i, mode=mode, poem_text=poem, word_ids=tuple(poem.split()),
                          stage1_text=result.stage1_text, stage2_text=result.stage2_text),
        )
    assert main(["replay", str(log)]) == 0
    out = capsys.readouterr().out
    assert "replayed 2 records" in out
    assert "2 matched, 0 differed" in out


def test_replay_reports_divergence(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    append_record(
        log,
        SessionRecord(ts_ms=0, mode=Mode.IDEATE, poem_text="human",
                      word_ids=("human",), stage1_text="x",
                      stage2_text="something a live model once said"),
    )
    assert main(["replay", str(log), "-v"]) == 0
    captured = capsys.readouterr()
    assert "1 differed" in captured.out
    assert "record 1" in captured.out


def test_serve_with_missing_config_fails(capsys):
    assert main(["serve", "--config", "does-not-exist.conf"]) != 0
    assert "serve" in capsys.readouterr().err
