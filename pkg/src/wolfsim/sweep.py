"""Batch experiments over suppressor placements and parameters.

Each cell of a sweep is an independent set of simulations, so cells are
farmed out to a process pool and gathered back by index. A cell that fails
(e.g. a diverging configuration) is recorded with its error and left as NaN
in the maps; the rest of the sweep is unaffected.
"""

from __future__ import annotations

import math
import os
import warnings
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .analysis import IndicatorReport, Spectrum, evaluate, note_spectrum, note_wolf_indicator
from .errors import ConfigError, WolfsimError
from .params import SuppressorParams
from .simulator import ScenarioConfig, run_all_notes, run_simulation

INDICATORS = ("J_wolf", "J_sustain", "J_fidelity")
DESK_RESOLUTION = 9
FULL_RESOLUTION = 45
SENSITIVITY_AXES = {"f_su": "frequency", "m_su": "mass", "zeta_su": "damping"}


@dataclass
class HeatMap:
    """Indicator values on a rectangular grid of settings.

    ``values[name]`` has shape ``(len(y_values), len(x_values))``; failed
    cells hold NaN and their error message is kept in ``errors``.
    """

    x_values: tuple[float, ...]
    y_values: tuple[float, ...]
    values: dict[str, np.ndarray]
    x_label: str = "x"
    y_label: str = "y"
    errors: dict[tuple[int, int], str] = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.y_values), len(self.x_values)

    @property
    def failed(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for iy, ix in self.errors:
            mask[iy, ix] = True
        return mask


@dataclass(frozen=True)
class SensitivityCurve:
    axis: str
    values: tuple[float, ...]
    j_wolf: tuple[float, ...]


def sweep_axis(n: int) -> tuple[float, ...]:
    """``n`` cell-centred fractions of the plate side."""
    if n < 1:
        raise ConfigError("resolution must be at least 1", "resolution")
    return tuple((k + 0.5) / n for k in range(n))


def resolve_resolution(resolution: int | None, full_scale: bool = False) -> int:
    if full_scale:
        warnings.warn(
            f"full-scale sweep: {FULL_RESOLUTION}x{FULL_RESOLUTION} cells, expect hours of runtime",
            RuntimeWarning,
            stacklevel=2,
        )
        return FULL_RESOLUTION
    return DESK_RESOLUTION if resolution is None else resolution


def _map(fn: Callable, jobs: list, workers: int | None) -> list:
    """Apply ``fn`` to every job, in a pool unless ``workers == 1``."""
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


def reference_spectra(cfg: ScenarioConfig) -> list[Spectrum]:
    """Spectra of every note with all suppressors removed."""
    refs = run_all_notes(cfg.with_suppressors(()))
    p = cfg.indicators
    return [note_spectrum(r.body, r.sample_rate, p.log_floor) for r in refs]


def scenario_report(
    cfg: ScenarioConfig, reference: Sequence[Spectrum] | None = None
) -> IndicatorReport:
    """Run every note and evaluate all indicators.

    Fidelity is only defined with a reference and at least two notes.
    """
    recs = run_all_notes(cfg)
    if reference is not None and cfg.n_notes < 2:
        reference = None
    return evaluate([r.body for r in recs], recs[0].sample_rate, cfg.indicators, reference)


def _indicator_values(report: IndicatorReport) -> dict[str, float]:
    out = {"J_wolf": report.J_wolf, "J_sustain": report.J_sustain}
    if report.J_fidelity is not None:
        out["J_fidelity"] = report.J_fidelity
    return out


def _cell(job) -> tuple[dict[str, float] | None, str | None]:
    cfg, reference = job
    try:
        return _indicator_values(scenario_report(cfg, reference)), None
    except (WolfsimError, FloatingPointError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _fill(results, shape, names) -> tuple[dict[str, np.ndarray], dict[tuple[int, int], str]]:
    values = {name: np.full(shape, np.nan) for name in names}
    errors = {}
    n_x = shape[1]
    for k, (cell, err) in enumerate(results):
        iy, ix = divmod(k, n_x)
        if err is not None:
            errors[(iy, ix)] = err
            continue
        for name in names:
            values[name][iy, ix] = cell[name]
    return values, errors


def _indicator_names(cfg: ScenarioConfig) -> tuple[str, ...]:
    return INDICATORS if cfg.n_notes >= 2 else INDICATORS[:2]


def placement_sweep(
    cfg: ScenarioConfig,
    x_values: Sequence[float],
    y_values: Sequence[float],
    workers: int | None = None,
    reference: Sequence[Spectrum] | None = None,
) -> HeatMap:
    """Move the scenario's single suppressor over a grid of positions.

    ``reference`` spectra (no suppressor) are computed once if not given.
    Single-note scenarios get no fidelity map, the measure being undefined
    when only the wolf note is played.
    """
    if len(cfg.suppressors) != 1:
        raise ConfigError("placement sweep needs exactly one suppressor", "suppressors")
    template = cfg.suppressors[0]
    if reference is None and cfg.n_notes >= 2:
        reference = reference_spectra(cfg)
    jobs = []
    for y in y_values:
        for x in x_values:
            su = replace(template, position=(float(x), float(y)))
            jobs.append((cfg.with_suppressors((su,)), reference))
    shape = (len(y_values), len(x_values))
    names = _indicator_names(cfg)
    values, errors = _fill(_map(_cell, jobs, workers), shape, names)
    return HeatMap(tuple(x_values), tuple(y_values), values, "x_su", "y_su", errors)


def _wolf_only(job) -> float:
    cfg, note = job
    rec = run_simulation(cfg, note)
    return note_wolf_indicator(rec.body, rec.sample_rate, cfg.indicators)


def sensitivity_scan(
    cfg: ScenarioConfig,
    axis: str,
    values: Sequence[float],
    workers: int | None = None,
) -> SensitivityCurve:
    """Wolf-note indicator as one suppressor parameter is varied.

    Stiffness follows from mass and frequency, so changing either retunes
    the spring. Only the wolf note is simulated.
    """
    if axis not in SENSITIVITY_AXES:
        raise ConfigError(f"unknown axis {axis!r}; choose from {tuple(SENSITIVITY_AXES)}", "axis")
    if len(cfg.suppressors) != 1:
        raise ConfigError("sensitivity scan needs exactly one suppressor", "suppressors")
    attr = SENSITIVITY_AXES[axis]
    note = cfg.indicators.wolf_note
    jobs = []
    for v in values:
        su = replace(cfg.suppressors[0], **{attr: float(v)})
        jobs.append((cfg.with_suppressors((su,)), note))
    j = _map(_wolf_only, jobs, workers)
    return SensitivityCurve(axis, tuple(float(v) for v in values), tuple(j))


def _relative(value: float, base: float) -> float:
    return (value - base) / abs(base)


def cross_sweep_two(
    cfg: ScenarioConfig,
    baseline: IndicatorReport | dict[str, float] | None,
    y1_values: Sequence[float],
    x2_values: Sequence[float],
    x1_fixed: float = 0.42,
    y2_fixed: float = 0.50,
    workers: int | None = None,
    reference: Sequence[Spectrum] | None = None,
) -> HeatMap:
    """Relative indicator change of a two-suppressor layout against a baseline.

    Suppressor 1 stays at ``x = x1_fixed`` and moves along ``y``; suppressor
    2 stays at ``y = y2_fixed`` and moves along ``x``. Each cell holds
    ``(J - J_base) / |J_base|``; negative values are improvements for
    ``J_wolf`` and ``J_fidelity``, positive ones for ``J_sustain``.
    """
    if baseline is None:
        raise ConfigError("a baseline report is required", "baseline")
    if len(cfg.suppressors) != 2:
        raise ConfigError("cross sweep needs exactly two suppressors", "suppressors")
    base = _indicator_values(baseline) if isinstance(baseline, IndicatorReport) else dict(baseline)
    names = tuple(n for n in _indicator_names(cfg) if n in base)
    for n in names:
        if not (math.isfinite(base[n]) and base[n] != 0.0):
            raise ConfigError(f"baseline {n} must be finite and non-zero", "baseline")
    if reference is None and "J_fidelity" in names:
        reference = reference_spectra(cfg)
    s1, s2 = cfg.suppressors
    jobs = []
    for y1 in y1_values:
        for x2 in x2_values:
            pair = (
                replace(s1, position=(float(x1_fixed), float(y1))),
                replace(s2, position=(float(x2), float(y2_fixed))),
            )
            jobs.append((cfg.with_suppressors(pair), reference))
    shape = (len(y1_values), len(x2_values))
    values, errors = _fill(_map(_cell, jobs, workers), shape, names)
    for n in names:
        values[n] = _relative(values[n], base[n])
    return HeatMap(tuple(x2_values), tuple(y1_values), values, "x_su2", "y_su1", errors)


def halved_pair(single: SuppressorParams, positions: Sequence[tuple[float, float]]):
    """Two suppressors sharing the mass and damping of ``single``."""
    return tuple(
        replace(single, position=tuple(p), mass=single.mass / 2, damping=single.damping / 2)
        for p in positions
    )
