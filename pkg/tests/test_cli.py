"""Command-line behavior: exit codes, defaults, config merging, outputs."""

import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from mramsim import ImageBuffer, dump_profile, get_profile, write_pgm
from mramsim.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def small_profile_path(tmp_path):
    """A 1024-word C5 written to disk, for fast CLI runs via --profile-path."""
    path = tmp_path / "c5_small.json"
    dump_profile(get_profile("C5", capacity_words=1024), path)
    return path


def _image_path(tmp_path, side=16):
    img = np.tile(np.linspace(0, 255, side).astype(np.uint8), (side, 1))
    path = tmp_path / "input.pgm"
    write_pgm(ImageBuffer(img), path)
    return path


def test_characterize_writes_map_and_stats(runner, small_profile_path, tmp_path):
    out = tmp_path / "run"
    result = runner.invoke(main, [
        "characterize", "--profile-path", str(small_profile_path),
        "--seed", "1", "--tw", "5", "--n", "3", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    doc = json.loads((out / "errmap.json").read_text())
    assert doc["chip_id"] == "C5:1"
    assert doc["n"] == 3
    assert len(doc["per_measurement_counts"]) == 3
    stats = (out / "stats.csv").read_text().splitlines()
    assert stats[0].startswith("chip_id,pattern,t_w_ns,n_measurements,e_a_pct")
    assert stats[1].startswith("C5:1,solid:0000,5,3,")


def test_characterize_rerun_is_byte_identical(runner, small_profile_path, tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = runner.invoke(main, [
            "characterize", "--profile-path", str(small_profile_path),
            "--seed", "2", "--n", "2", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        outs.append((out / "errmap.json").read_bytes())
    assert outs[0] == outs[1]


def test_seed_environment_variable_is_honored(runner, small_profile_path, tmp_path):
    by_flag = tmp_path / "flag"
    by_env = tmp_path / "env"
    r1 = runner.invoke(main, [
        "characterize", "--profile-path", str(small_profile_path),
        "--seed", "7", "--n", "2", "--out", str(by_flag),
    ])
    r2 = runner.invoke(main, [
        "characterize", "--profile-path", str(small_profile_path),
        "--n", "2", "--out", str(by_env),
    ], env={"MRAMSIM_SEED": "7"})
    assert r1.exit_code == 0 and r2.exit_code == 0
    assert (by_flag / "errmap.json").read_bytes() == (
        by_env / "errmap.json"
    ).read_bytes()


def test_config_file_supplies_defaults_and_flags_override(
    runner, small_profile_path, tmp_path
):
    config = tmp_path / "exp.json"
    config.write_text(json.dumps({
        "profile_path": str(small_profile_path),
        "seed": 5,
        "t_w_ns": 5.0,
        "n_measurements": 2,
        "output_dir": str(tmp_path / "from_config"),
    }))
    r1 = runner.invoke(main, ["characterize", "--config", str(config)])
    assert r1.exit_code == 0, r1.output
    doc = json.loads((tmp_path / "from_config" / "errmap.json").read_text())
    assert doc["chip_id"] == "C5:5"

    r2 = runner.invoke(main, [
        "characterize", "--config", str(config),
        "--seed", "6", "--out", str(tmp_path / "flag_wins"),
    ])
    assert r2.exit_code == 0, r2.output
    doc2 = json.loads((tmp_path / "flag_wins" / "errmap.json").read_text())
    assert doc2["chip_id"] == "C5:6"


def test_sweep_csv_columns(runner, small_profile_path, tmp_path):
    out = tmp_path / "sw"
    result = runner.invoke(main, [
        "sweep", "--profile-path", str(small_profile_path),
        "--tw", "5", "--tw", "15", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "t_w_ns,failed_bit_pct,current_saving_pct,power_reduction_pct"
    five = lines[1].split(",")
    assert five[0] == "5"
    assert five[2] == "66.000000"
    assert five[3] == "88.440000"
    fifteen = lines[2].split(",")
    assert fifteen[1] == "0.000000"


def test_image_command_full_cycle(runner, small_profile_path, tmp_path):
    img = _image_path(tmp_path)
    out = tmp_path / "img_out"
    result = runner.invoke(main, [
        "image", "--profile-path", str(small_profile_path),
        "--image", str(img), "--init", "all_zeros", "--select", "none",
        "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    quality = (out / "quality.csv").read_text().splitlines()
    assert quality[0] == "image,init,selection,t_w_ns,snr,mse,erroneous_pixels"
    assert quality[1] == "input.pgm,all_zeros,none,5,inf,0.000000,0"
    assert (out / "readback.pgm").read_bytes() == img.read_bytes()


def test_image_with_selection(runner, small_profile_path, tmp_path):
    img = _image_path(tmp_path)
    out = tmp_path / "sel_out"
    result = runner.invoke(main, [
        "image", "--profile-path", str(small_profile_path),
        "--image", str(img), "--init", "all_ones", "--select", "strategy1",
        "--n", "50", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    row = (out / "quality.csv").read_text().splitlines()[1]
    assert row.split(",")[5] == "0.000000"  # mse column


def test_report_tabulates_multiple_maps(runner, small_profile_path, tmp_path):
    char_out = tmp_path / "char"
    eval_out = tmp_path / "eval"
    for out, pattern in ((char_out, "solid:0000"), (eval_out, "checkerboard:aaaa")):
        result = runner.invoke(main, [
            "characterize", "--profile-path", str(small_profile_path),
            "--seed", "1", "--n", "2", "--pattern", pattern, "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
    rep = tmp_path / "rep"
    result = runner.invoke(main, [
        "report", str(char_out / "errmap.json"), str(eval_out / "errmap.json"),
        "--out", str(rep),
    ])
    assert result.exit_code == 0, result.output
    lines = (rep / "report.csv").read_text().splitlines()
    assert len(lines) == 2
    row = lines[1].split(",")
    assert row[1] == "checkerboard:aaaa"
    assert row[6] == "0.000000"  # alternating data never fails at 5 ns
    assert row[8] == "-"  # coverage of a clean map is undefined


def test_report_rejects_mixed_pulse_widths(runner, small_profile_path, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out, tw in ((a, "5"), (b, "2.5")):
        assert runner.invoke(main, [
            "characterize", "--profile-path", str(small_profile_path),
            "--n", "2", "--tw", tw, "--out", str(out),
        ]).exit_code == 0
    result = runner.invoke(main, [
        "report", str(a / "errmap.json"), str(b / "errmap.json"),
        "--out", str(tmp_path / "rep"),
    ])
    assert result.exit_code == 1


class TestExitCodes:
    def test_unknown_profile_is_a_domain_error(self, runner, tmp_path):
        result = runner.invoke(main, [
            "characterize", "--profile", "C9", "--out", str(tmp_path)
        ])
        assert result.exit_code == 1

    def test_out_of_range_temperature_is_a_domain_error(
        self, runner, small_profile_path, tmp_path
    ):
        result = runner.invoke(main, [
            "characterize", "--profile-path", str(small_profile_path),
            "--temp", "99", "--out", str(tmp_path),
        ])
        assert result.exit_code == 1

    def test_missing_image_file_is_a_file_error(
        self, runner, small_profile_path, tmp_path
    ):
        result = runner.invoke(main, [
            "image", "--profile-path", str(small_profile_path),
            "--image", str(tmp_path / "nope.pgm"), "--out", str(tmp_path),
        ])
        assert result.exit_code == 2

    def test_malformed_pattern_is_a_domain_error(
        self, runner, small_profile_path, tmp_path
    ):
        result = runner.invoke(main, [
            "characterize", "--profile-path", str(small_profile_path),
            "--pattern", "wave:0000", "--out", str(tmp_path),
        ])
        assert result.exit_code == 1

    def test_profile_flags_are_mutually_exclusive(
        self, runner, small_profile_path, tmp_path
    ):
        result = runner.invoke(main, [
            "characterize", "--profile", "C1",
            "--profile-path", str(small_profile_path), "--out", str(tmp_path),
        ])
        assert result.exit_code == 2

    def test_profile_is_required_somewhere(self, runner, tmp_path):
        result = runner.invoke(main, ["characterize", "--out", str(tmp_path)])
        assert result.exit_code == 2

    def test_image_flag_required_without_config(self, runner, small_profile_path):
        result = runner.invoke(main, [
            "image", "--profile-path", str(small_profile_path),
        ])
        assert result.exit_code == 2

    def test_unreadable_config_is_a_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, [
            "characterize", "--config", str(tmp_path / "none.json"),
        ])
        assert result.exit_code == 2

    def test_invalid_json_config_is_a_usage_error(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        result = runner.invoke(main, [
            "characterize", "--config", str(bad),
        ])
        assert result.exit_code == 2
