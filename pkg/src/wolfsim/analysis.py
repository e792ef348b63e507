"""Waveform indicators: wolf intensity, sustain and spectral fidelity.

The wolf indicator looks for slow beating. Each note's body waveform is
mapped to [0, 1], its amplitude envelope is taken from the analytic signal,
smoothed with a short rectangular kernel, stripped of its mean, and the
share of its spectral energy in a low band (a few Hz) is reported.

The sustain indicator is the negated weakest tail amplitude across notes,
so larger is better. The fidelity indicator is the mean L1 distance between
log-magnitude spectra with and without suppressors, excluding the wolf note.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter1d
from scipy.signal import hilbert

from .errors import ConfigError

# Relative slack when testing whether a bin frequency sits on a band edge.
_EDGE_RTOL = 1e-9


@dataclass(frozen=True)
class IndicatorParams:
    """Settings of the three indicator pipelines.

    ``wolf_note`` is 1-based, matching the usual note numbering.
    """

    theta: float = 1.0e-2
    f_minus: float = 2.0
    f_plus: float = 13.0
    f_max: float = 100.0
    t_star: float = 0.9
    log_floor: float = 1.0e-12
    wolf_note: int = 5

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise ConfigError("must be positive", "theta")
        if not (0 < self.f_minus < self.f_plus < self.f_max):
            raise ConfigError("need 0 < f_minus < f_plus < f_max", "f_minus")
        if not (math.isfinite(self.t_star) and self.t_star > 0):
            raise ConfigError("must be positive", "t_star")
        if not (self.log_floor > 0):
            raise ConfigError("must be positive", "log_floor")
        if self.wolf_note < 1:
            raise ConfigError("notes are numbered from 1", "wolf_note")


@dataclass(frozen=True)
class Spectrum:
    """Log-magnitude spectrum in dB on the non-negative frequency bins."""

    freqs: np.ndarray
    db: np.ndarray

    @property
    def df(self) -> float:
        return float(self.freqs[1] - self.freqs[0]) if len(self.freqs) > 1 else 0.0


@dataclass(frozen=True)
class IndicatorReport:
    j_wolf: tuple[float, ...]
    J_wolf: float
    J_sustain: float
    J_fidelity: float | None = None
    distances: tuple[float, ...] | None = None

    @property
    def worst_note(self) -> int:
        """1-based note with the largest wolf indicator."""
        return int(np.argmax(self.j_wolf)) + 1

    def as_dict(self) -> dict:
        return {
            "j_wolf": list(self.j_wolf),
            "J_wolf": self.J_wolf,
            "J_sustain": self.J_sustain,
            "J_fidelity": self.J_fidelity,
            "distances": None if self.distances is None else list(self.distances),
        }


def normalize_unit(y: np.ndarray) -> np.ndarray:
    """Affine map onto [0, 1]; a (numerically) constant signal maps to zeros."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ValueError("empty signal")
    lo, hi = y.min(), y.max()
    span = hi - lo
    if span < 1e-15 * max(np.abs(y).max(), 1.0):
        return np.zeros_like(y)
    return (y - lo) / span


def analytic_envelope(y: np.ndarray) -> np.ndarray:
    """Modulus of the analytic signal, built in the frequency domain."""
    y = np.asarray(y, dtype=float)
    if not y.any():
        return np.zeros_like(y)
    return np.abs(hilbert(y))


def window_length(theta: float, rate: float) -> int:
    w = int(round(theta * rate))
    if w < 1:
        raise ConfigError(f"smoothing window {theta!r} s is shorter than one sample", "theta")
    return w


def moving_average(a: np.ndarray, theta: float, rate: float) -> np.ndarray:
    """Centred rectangular mean over ``round(theta * rate)`` samples.

    The signal is extended by half-sample reflection at both ends, so the
    output has the input's length.
    """
    w = window_length(theta, rate)
    a = np.asarray(a, dtype=float)
    if w == 1:
        return a.copy()
    return uniform_filter1d(a, size=w, mode="reflect")


def detrend(a: np.ndarray) -> np.ndarray:
    return a - a.mean()


def _band_mask(freqs: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return (freqs >= lo * (1 - _EDGE_RTOL)) & (freqs <= hi * (1 + _EDGE_RTOL))


def band_energy_ratio(e: np.ndarray, rate: float, p: IndicatorParams) -> float:
    """Share of spectral energy in ``[f_minus, f_plus]`` out of ``[0, f_max]``."""
    e = np.asarray(e, dtype=float)
    power = np.abs(np.fft.rfft(e)) ** 2
    freqs = np.fft.rfftfreq(e.size, 1.0 / rate)
    total = power[_band_mask(freqs, 0.0, p.f_max)].sum()
    if total == 0.0:
        return 0.0
    band = power[_band_mask(freqs, p.f_minus, p.f_plus)].sum()
    return float(band / total)


def note_wolf_indicator(y: np.ndarray, rate: float, p: IndicatorParams) -> float:
    envelope = analytic_envelope(normalize_unit(y))
    smooth = moving_average(envelope, p.theta, rate)
    return band_energy_ratio(detrend(smooth), rate, p)


def wolf_indicator(
    waveforms: Sequence[np.ndarray], rate: float, p: IndicatorParams
) -> tuple[tuple[float, ...], float]:
    """Per-note wolf indicators and their maximum."""
    if len(waveforms) == 0:
        raise ValueError("no waveforms")
    j = tuple(note_wolf_indicator(y, rate, p) for y in waveforms)
    return j, max(j)


def sustain_indicator(waveforms: Sequence[np.ndarray], rate: float, t_star: float) -> float:
    """``-min_i max_{t >= t_star} |y_i(t)|`` on raw waveforms.

    Sample ``n`` is taken to be the displacement at time ``(n + 1) / rate``.
    """
    if len(waveforms) == 0:
        raise ValueError("no waveforms")
    tails = []
    for y in waveforms:
        y = np.asarray(y, dtype=float)
        t = np.arange(1, y.size + 1) / rate
        tail = y[t >= t_star]
        if tail.size == 0:
            raise ConfigError(
                f"sustain window starts at {t_star!r} s, after the signal ends", "t_star"
            )
        tails.append(np.abs(tail).max())
    return -float(min(tails))


def log_spectrum(y: np.ndarray, rate: float = 1.0, eps: float = 1.0e-12) -> Spectrum:
    """``20 log10(max(|FFT(y)|, eps))`` with an un-normalized forward FFT."""
    y = np.asarray(y, dtype=float)
    magnitude = np.abs(np.fft.rfft(y))
    db = 20.0 * np.log10(np.maximum(magnitude, eps))
    return Spectrum(np.fft.rfftfreq(y.size, 1.0 / rate), db)


def note_spectrum(y: np.ndarray, rate: float, eps: float = 1.0e-12) -> Spectrum:
    """Log spectrum of the waveform after mapping it to [0, 1]."""
    return log_spectrum(normalize_unit(y), rate, eps)


def spectral_distance(a: Spectrum, b: Spectrum) -> float:
    """Rectangle-rule L1 distance in dB*Hz over all bins up to Nyquist."""
    if a.freqs.shape != b.freqs.shape or not np.array_equal(a.freqs, b.freqs):
        raise ValueError("spectra are on different frequency grids")
    return float(np.abs(a.db - b.db).sum() * a.df)


def fidelity_indicator(
    ref_spectra: Sequence[Spectrum], su_spectra: Sequence[Spectrum], wolf_note: int
) -> tuple[float, tuple[float, ...]]:
    """Mean spectral distance over all notes except ``wolf_note`` (1-based).

    Returns the mean and the per-note distances.
    """
    if len(ref_spectra) != len(su_spectra):
        raise ValueError("reference and suppressed sets differ in length")
    n = len(ref_spectra)
    if n < 2:
        raise ValueError("fidelity needs at least two notes")
    if not 1 <= wolf_note <= n:
        raise ConfigError(f"wolf note {wolf_note} outside 1..{n}", "wolf_note")
    distances = tuple(spectral_distance(a, b) for a, b in zip(ref_spectra, su_spectra))
    others = [d for i, d in enumerate(distances, start=1) if i != wolf_note]
    return sum(others) / (n - 1), distances


def evaluate(
    waveforms: Sequence[np.ndarray],
    rate: float,
    p: IndicatorParams,
    reference: Sequence[Spectrum] | None = None,
) -> IndicatorReport:
    """All indicators for one set of note waveforms.

    ``reference`` holds the spectra of the same notes without suppressors;
    without it the fidelity fields stay ``None``.
    """
    j, J_wolf = wolf_indicator(waveforms, rate, p)
    J_sustain = sustain_indicator(waveforms, rate, p.t_star)
    J_fid = distances = None
    if reference is not None:
        spectra = [note_spectrum(y, rate, p.log_floor) for y in waveforms]
        J_fid, distances = fidelity_indicator(reference, spectra, p.wolf_note)
    return IndicatorReport(j, J_wolf, J_sustain, J_fid, distances)


def spectral_peak(
    y: np.ndarray, rate: float, f_lo: float, f_hi: float, oversample: int = 8
) -> float:
    """Frequency of the largest Hann-windowed magnitude strictly inside (f_lo, f_hi)."""
    y = np.asarray(y, dtype=float)
    n_fft = oversample * y.size
    magnitude = np.abs(np.fft.rfft(y * np.hanning(y.size), n_fft))
    freqs = np.fft.rfftfreq(n_fft, 1.0 / rate)
    mask = (freqs > f_lo) & (freqs < f_hi)
    if not mask.any():
        raise ValueError(f"no bins inside ({f_lo}, {f_hi}) Hz")
    return float(freqs[mask][np.argmax(magnitude[mask])])


def fundamental_near(y: np.ndarray, rate: float, nominal: float, semitones: float = 1.0) -> float:
    """Spectral peak within ``semitones`` of a nominal pitch.

    A window around the expected note avoids locking onto a strong body
    resonance elsewhere in the spectrum.
    """
    ratio = 2.0 ** (semitones / 12.0)
    return spectral_peak(y, rate, nominal / ratio, nominal * ratio)
