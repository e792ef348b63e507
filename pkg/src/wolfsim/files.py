"""Serializers: WAV audio, heat-map and curve CSVs, JSON reports.

Every writer produces the same bytes for the same input: floats are written
with ``repr`` (shortest round-trip form), CSVs use LF line endings and JSON
keys are emitted in a fixed order.
"""

from __future__ import annotations

import csv
import io
import json
import wave
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from scipy.signal import decimate

from .analysis import IndicatorParams, note_wolf_indicator
from .errors import ConfigError, WolfsimError
from .simulator import Recording
from .sweep import HeatMap, SensitivityCurve

PEAK = 0.9
FULL_SCALE = 32767


class AudioFormatError(WolfsimError, ValueError):
    """WAV file in an encoding this package does not read."""


def wav_samples(rec: Recording, decimation: int = 1) -> tuple[np.ndarray, int]:
    """Quantized 16-bit samples and the integer sample rate for ``rec``."""
    y = np.asarray(rec.body, dtype=float)
    if not np.isfinite(y).all():
        raise ConfigError("recording holds non-finite samples", "recording")
    if decimation < 1:
        raise ConfigError("must be a positive integer", "decimate")
    if decimation > 1:
        y = decimate(y, decimation, ftype="fir", zero_phase=True)
    peak = np.abs(y).max() if y.size else 0.0
    scaled = y * (PEAK / peak) if peak > 0 else np.zeros_like(y)
    pcm = np.round(scaled * FULL_SCALE).astype("<i2")
    rate = int(round(rec.sample_rate / decimation))
    return pcm, rate


def write_wav(rec: Recording, path: str | Path, decimation: int = 1) -> Path:
    """16-bit mono PCM of the body waveform, peak-normalized to 0.9."""
    pcm, rate = wav_samples(rec, decimation)
    path = Path(path)
    with open(path, "wb") as fh, wave.open(fh, "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(rate)
        f.writeframes(pcm.tobytes())
    return path


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Mono integer-PCM WAV as floats in [-1, 1) and its sample rate."""
    try:
        with wave.open(str(path), "rb") as f:
            channels = f.getnchannels()
            width = f.getsampwidth()
            rate = f.getframerate()
            raw = f.readframes(f.getnframes())
    except wave.Error as exc:
        raise AudioFormatError(f"{path}: {exc}") from None
    except EOFError:
        raise AudioFormatError(f"{path}: truncated file") from None
    if channels != 1:
        raise AudioFormatError(f"{path}: expected mono, got {channels} channels")
    if width == 1:
        data = (np.frombuffer(raw, dtype=np.uint8).astype(float) - 128.0) / 128.0
    elif width == 2:
        data = np.frombuffer(raw, dtype="<i2").astype(float) / 32768.0
    elif width == 3:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        v = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        v = np.where(v >= 1 << 23, v - (1 << 24), v)
        data = v.astype(float) / float(1 << 23)
    elif width == 4:
        data = np.frombuffer(raw, dtype="<i4").astype(float) / float(1 << 31)
    else:
        raise AudioFormatError(f"{path}: unsupported sample width {width}")
    return data, rate


def _fmt(v: float) -> str:
    return "" if not np.isfinite(v) else repr(float(v))


def heatmap_csv_text(h: HeatMap) -> str:
    """CSV form of ``h``.

    The header row holds ``indicator``, ``<y label>\\<x label>`` and the x
    values. Each data row holds the indicator name, the y value and one cell
    per x value; failed cells are empty.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["indicator", f"{h.y_label}\\{h.x_label}", *map(_fmt, h.x_values)])
    for name, grid in h.values.items():
        for y, row in zip(h.y_values, grid):
            w.writerow([name, _fmt(y), *map(_fmt, row)])
    return buf.getvalue()


def write_heatmap_csv(h: HeatMap, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(heatmap_csv_text(h).encode("utf-8"))
    return path


def read_heatmap_csv(path: str | Path) -> HeatMap:
    text = Path(path).read_bytes().decode("utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or len(rows[0]) < 3 or rows[0][0] != "indicator":
        raise ConfigError("not a heat-map CSV", str(path))
    y_label, _, x_label = rows[0][1].partition("\\")
    xs = tuple(float(v) for v in rows[0][2:])
    order: list[str] = []
    cells: dict[str, list[list[float]]] = {}
    ys: dict[str, list[float]] = {}
    for row in rows[1:]:
        name = row[0]
        if name not in cells:
            order.append(name)
            cells[name] = []
            ys[name] = []
        ys[name].append(float(row[1]))
        cells[name].append([float(v) if v != "" else np.nan for v in row[2:]])
    y_values = tuple(ys[order[0]]) if order else ()
    values = {name: np.array(cells[name], dtype=float).reshape(len(y_values), len(xs)) for name in order}
    errors = {}
    if order:
        for iy, ix in zip(*np.nonzero(np.isnan(values[order[0]]))):
            errors[(int(iy), int(ix))] = "failed"
    return HeatMap(xs, y_values, values, x_label or "x", y_label or "y", errors)


def curve_csv_text(curve: SensitivityCurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([curve.axis, "j_wolf"])
    for v, j in zip(curve.values, curve.j_wolf):
        w.writerow([_fmt(v), _fmt(j)])
    return buf.getvalue()


def write_curve_csv(curve: SensitivityCurve, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(curve_csv_text(curve).encode("utf-8"))
    return path


def write_json(data: dict, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes((json.dumps(data, indent=2, allow_nan=True) + "\n").encode("utf-8"))
    return path


def segment_indicators(
    samples: np.ndarray,
    rate: float,
    params: IndicatorParams,
    segments: Sequence[tuple[float, float]],
) -> list[float]:
    """Wolf indicator of each ``(start, end)`` slice, in seconds."""
    duration = samples.size / rate
    out = []
    for k, (start, end) in enumerate(segments):
        if not (0.0 <= start < end <= duration + 0.5 / rate):
            raise ConfigError(
                f"segment ({start}, {end}) outside 0..{duration:.6g} s", f"segments[{k}]"
            )
        a, b = int(round(start * rate)), int(round(end * rate))
        out.append(note_wolf_indicator(samples[a:b], rate, params))
    return out


def analyze_external(
    path: str | Path, params: IndicatorParams, segments: Sequence[tuple[float, float]]
) -> list[float]:
    """Wolf indicator for hand-segmented notes of a mono recording."""
    samples, rate = read_wav(path)
    return segment_indicators(samples, float(rate), params, segments)
