import dataclasses

import numpy as np
import pytest

from conftest import short_config
from wolfsim.analysis import note_wolf_indicator
from wolfsim.errors import ConfigError
from wolfsim.params import SuppressorParams
from wolfsim.simulator import Simulation, run_simulation
from wolfsim.sweep import (
    FULL_RESOLUTION,
    HeatMap,
    cross_sweep_two,
    halved_pair,
    placement_sweep,
    reference_spectra,
    resolve_resolution,
    scenario_report,
    sensitivity_scan,
    sweep_axis,
)

SU = SuppressorParams(position=(0.70, 0.49))


def _cfg(**kw):
    kw.setdefault("total_time", 0.3)
    return short_config(**kw)


def test_sweep_axis():
    assert sweep_axis(1) == (0.5,)
    assert sweep_axis(4) == (0.125, 0.375, 0.625, 0.875)
    with pytest.raises(ConfigError):
        sweep_axis(0)


def test_resolution_defaults():
    assert resolve_resolution(None) == 9
    assert resolve_resolution(5) == 5
    with pytest.warns(RuntimeWarning):
        assert resolve_resolution(None, full_scale=True) == FULL_RESOLUTION


def test_zero_mass_rejected_before_any_run():
    with pytest.raises(ConfigError):
        SuppressorParams(mass=0.0)


def test_single_cell_matches_scenario_report():
    cfg = _cfg(suppressors=(SU,))
    ref = reference_spectra(cfg)
    h = placement_sweep(cfg, [0.70], [0.49], workers=1, reference=ref)
    r = scenario_report(cfg, ref)
    assert h.shape == (1, 1) and not h.errors
    assert h.values["J_wolf"][0, 0] == r.J_wolf
    assert h.values["J_sustain"][0, 0] == r.J_sustain
    assert h.values["J_fidelity"][0, 0] == r.J_fidelity


def test_failed_cells_are_isolated():
    cfg = _cfg(suppressors=(SU,), total_time=0.05)
    xs, ys = [0.3, 0.0001], [0.5]
    # the second position lies between the edge and the first node row
    h = placement_sweep(cfg, xs, ys, workers=1)
    assert set(h.errors) == {(0, 1)}
    assert "touches boundary node" in h.errors[(0, 1)]
    assert np.isnan(h.values["J_wolf"][0, 1]) and np.isfinite(h.values["J_wolf"][0, 0])
    ok = placement_sweep(cfg, xs[:1], ys, workers=1)
    for name in ok.values:
        assert ok.values[name][0, 0] == h.values[name][0, 0]
    assert h.failed.tolist() == [[False, True]]


def test_cells_are_order_and_worker_independent():
    cfg = _cfg(suppressors=(SU,), lengths=(0.197,))
    xs, ys = [0.3, 0.7], [0.25, 0.6]
    a = placement_sweep(cfg, xs, ys, workers=1)
    b = placement_sweep(cfg, xs[::-1], ys[::-1], workers=1)
    c = placement_sweep(cfg, xs, ys, workers=2)
    assert set(a.values) == {"J_wolf", "J_sustain"}
    for name in a.values:
        np.testing.assert_array_equal(a.values[name], b.values[name][::-1, ::-1])
        np.testing.assert_array_equal(a.values[name], c.values[name])


def test_on_node_positions_match_single_node_coupling():
    node = (31, 22)
    su = dataclasses.replace(SU, position=(node[0] / 44, node[1] / 44))
    cfg = short_config(suppressors=(su,), total_time=0.01)
    sim = Simulation(cfg, 1)
    nodes, weights = sim.setup.su_stencils[0]
    assert list(weights) == [1.0, 0.0, 0.0, 0.0] and nodes[0] == node
    sim.setup = dataclasses.replace(sim.setup, su_stencils=(([node], np.array([1.0])),))
    nearest = sim.run()
    bilinear = run_simulation(cfg, 1)
    np.testing.assert_array_equal(nearest.body, bilinear.body)
    np.testing.assert_array_equal(nearest.string, bilinear.string)


def test_single_value_scan_reproduces_plain_run():
    cfg = _cfg(suppressors=(SU,), lengths=(0.209, 0.197), wolf_note=2)
    curve = sensitivity_scan(cfg, "f_su", [SU.frequency], workers=1)
    rec = run_simulation(cfg, 2)
    assert curve.j_wolf == (note_wolf_indicator(rec.body, rec.sample_rate, cfg.indicators),)


def test_scan_overrides_and_retunes():
    cfg = _cfg(suppressors=(SU,), lengths=(0.197,))
    m = sensitivity_scan(cfg, "m_su", [4e-3, 8.5e-3, 1.7e-2], workers=1)
    assert m.values == (4e-3, 8.5e-3, 1.7e-2) and len(set(m.j_wolf)) > 1
    z = sensitivity_scan(cfg, "zeta_su", [0.0], workers=1)
    assert np.isfinite(z.j_wolf[0])
    with pytest.raises(ConfigError):
        sensitivity_scan(cfg, "zeta_su", [-1.0], workers=1)
    with pytest.raises(ConfigError):
        sensitivity_scan(cfg, "k_su", [1.0], workers=1)
    with pytest.raises(ConfigError):
        sensitivity_scan(cfg.with_suppressors(()), "f_su", [200.0], workers=1)


def test_halved_pair():
    a, b = halved_pair(SU, [(0.1, 0.2), (0.3, 0.4)])
    assert a.mass == b.mass == SU.mass / 2 and a.damping == SU.damping / 2
    assert a.frequency == SU.frequency and b.position == (0.3, 0.4)
    assert a.stiffness + b.stiffness == pytest.approx(SU.stiffness)


def test_stacked_halves_match_single_suppressor():
    single = SuppressorParams(position=(0.19, 0.49))
    cfg1 = _cfg(excitation="bow", suppressors=(single,))
    cfg2 = cfg1.with_suppressors(halved_pair(single, [single.position] * 2))
    ref = reference_spectra(cfg1)
    base = scenario_report(cfg1, ref)
    h = cross_sweep_two(cfg2, base, [0.49], [0.19], x1_fixed=0.19, y2_fixed=0.49, workers=1, reference=ref)
    assert h.x_label == "x_su2" and h.y_label == "y_su1"
    assert abs(h.values["J_wolf"][0, 0]) <= 0.15


def test_self_baseline_gives_zero():
    pair = halved_pair(SU, [(0.42, 0.3), (0.6, 0.50)])
    cfg = _cfg(suppressors=pair)
    ref = reference_spectra(cfg)
    base = scenario_report(cfg, ref)
    h = cross_sweep_two(cfg, base, [0.3], [0.6], workers=1, reference=ref)
    for name in ("J_wolf", "J_sustain", "J_fidelity"):
        assert h.values[name][0, 0] == 0.0


def test_cross_sweep_preconditions():
    pair = halved_pair(SU, [(0.42, 0.3), (0.6, 0.50)])
    cfg = _cfg(suppressors=pair, total_time=0.05)
    with pytest.raises(ConfigError):
        cross_sweep_two(cfg, None, [0.5], [0.5])
    with pytest.raises(ConfigError):
        cross_sweep_two(cfg, {"J_wolf": 0.0, "J_sustain": 1.0}, [0.5], [0.5])
    with pytest.raises(ConfigError):
        cross_sweep_two(cfg.with_suppressors(pair[:1]), {"J_wolf": 1.0}, [0.5], [0.5])
    with pytest.raises(ConfigError):
        placement_sweep(cfg, [0.5], [0.5])


def test_heatmap_failed_mask():
    h = HeatMap((0.1, 0.2), (0.5,), {"J_wolf": np.array([[1.0, np.nan]])}, errors={(0, 1): "x"})
    assert h.shape == (1, 2)
    assert h.failed.tolist() == [[False, True]]


def test_runtime_scales_with_cell_count():
    import time

    cfg = _cfg(suppressors=(SU,), lengths=(0.197,), total_time=0.1)
    placement_sweep(cfg, [0.5], [0.5], workers=1)

    def timed(n):
        t0 = time.perf_counter()
        placement_sweep(cfg, sweep_axis(n), [0.5], workers=1)
        return time.perf_counter() - t0

    ratio = timed(4) / timed(1)
    assert 2.0 <= ratio <= 8.0
