import json

import numpy as np
import pytest

from wolfsim import files
from wolfsim.analysis import evaluate, note_spectrum
from wolfsim.cli import main
from wolfsim.config import build_scenario
from wolfsim.simulator import Recording, run_all_notes
from wolfsim.sweep import placement_sweep, sensitivity_scan, sweep_axis

SHORT = {
    "numerics": {"total_time": 0.3, "t_star": 0.15},
    "notes": {
        "pluck_lengths": [0.197, 0.178],
        "bow_lengths": [0.201, 0.177],
        "frequencies": [246.9, 277.2],
        "wolf_note": 1,
    },
}


@pytest.fixture
def short_json(tmp_path):
    path = tmp_path / "short.json"
    path.write_text(json.dumps(SHORT))
    return path


def test_simulate_matches_library(tmp_path, short_json, capsys):
    out = tmp_path / "run"
    assert main(["simulate", "--scenario", "PLUCK-0S", "--config", str(short_json), "--out", str(out)]) == 0
    cfg = build_scenario("PLUCK-0S", short_json)
    recs = run_all_notes(cfg)
    ref = [note_spectrum(r.body, r.sample_rate, cfg.indicators.log_floor) for r in recs]
    want = evaluate([r.body for r in recs], recs[0].sample_rate, cfg.indicators, ref)
    report = json.loads((out / "report.json").read_text())
    assert report["j_wolf"] == list(want.j_wolf)
    assert report["J_sustain"] == want.J_sustain
    assert report["J_fidelity"] == 0.0
    data, rate = files.read_wav(out / "note_01.wav")
    pcm, _ = files.wav_samples(recs[0])
    np.testing.assert_array_equal(np.round(data * 32768).astype(int), pcm)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"] == "PLUCK-0S" and manifest["config_path"] == str(short_json)
    assert "J_wolf" in capsys.readouterr().out


def test_outputs_are_byte_reproducible(tmp_path, short_json):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        args = ["simulate", "--scenario", "PLUCK-1S", "--config", str(short_json), "--out", str(out), "--decimate", "4"]
        assert main(args) == 0
        outs.append(out)
    for f in ("note_01.wav", "note_02.wav", "report.json"):
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()


def test_sweep_matches_library(tmp_path, short_json):
    out = tmp_path / "map"
    args = ["sweep", "--scenario", "PLUCK-1S", "--config", str(short_json), "--out", str(out)]
    assert main(args + ["--resolution", "2", "--workers", "1"]) == 0
    want = placement_sweep(build_scenario("PLUCK-1S", short_json), sweep_axis(2), sweep_axis(2), workers=1)
    assert (out / "heatmap.csv").read_text() == files.heatmap_csv_text(want)
    assert json.loads((out / "manifest.json").read_text())["resolution"] == 2


def test_sensitivity_matches_library(tmp_path, short_json):
    out = tmp_path / "sens"
    args = ["sensitivity", "--config", str(short_json), "--out", str(out), "--axis", "m_su", "--factors", "0.5,1"]
    assert main(args + ["--workers", "1"]) == 0
    cfg = build_scenario("PLUCK-1S", short_json)
    want = sensitivity_scan(cfg, "m_su", [0.5 * 8.5e-3, 8.5e-3], workers=1)
    assert (out / "sensitivity_m_su.csv").read_text() == files.curve_csv_text(want)


def test_analyze(tmp_path, capsys):
    rate = 8000
    t = np.arange(2 * rate) / rate
    y = np.cos(2 * np.pi * 220 * t) * (1 + 0.5 * np.cos(2 * np.pi * 5 * t))
    rec = Recording(y, y, y, rate, 1, 0.2, "pluck")
    wav = files.write_wav(rec, tmp_path / "am.wav")
    assert main(["analyze", str(wav), "--segment", "0:2", "--out", str(tmp_path)]) == 0
    result = json.loads((tmp_path / "analysis.json").read_text())
    assert result["j_wolf"] == files.analyze_external(wav, build_scenario("PLUCK-0S").indicators, [(0, 2)])
    assert result["j_wolf"][0] > 0.9


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"body": {"poisson": 0.7}}))
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")]) == 1

    loud = tmp_path / "loud.json"
    loud.write_text(json.dumps({**SHORT, "excitation": {"pluck": {"amplitude": 1e13}}}))
    assert main(["simulate", "--config", str(loud), "--out", str(tmp_path / "o")]) == 2

    assert main(["simulate", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path / "o")]) == 3
    assert main(["analyze", str(tmp_path / "none.wav"), "--segment", "0:1"]) == 3
    stereo = tmp_path / "stereo.wav"
    import wave

    with wave.open(str(stereo), "wb") as f:
        f.setnchannels(2)
        f.setsampwidth(2)
        f.setframerate(8000)
        f.writeframes(bytes(16))
    assert main(["analyze", str(stereo), "--segment", "0:0.001"]) == 1
    with pytest.raises(SystemExit):
        main(["simulate", "--scenario", "NOPE", "--out", "x"])
