import dataclasses

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wolfsim.errors import GridError, InstabilityError
from wolfsim.params import GHOSTS, PlateParams, derive_plate_coeffs
from wolfsim.plate_fdtd import (
    PlateState,
    apply_plate_bcs,
    bilinear_stencil,
    new_plate_state,
    sample_bilinear,
    spread_bilinear,
    step_plate,
)

DT = 5.7e-6
COEFFS = derive_plate_coeffs(PlateParams(), DT)
M = COEFFS.intervals


def random_state(c, rng):
    s = new_plate_state(c)
    s.w_prev[:] = rng.standard_normal(s.w_prev.shape) * 1e-4
    s.w_curr[:] = rng.standard_normal(s.w_curr.shape) * 1e-4
    return apply_plate_bcs(s)


def lap5(w, i, j):
    return w[i + 1, j] + w[i - 1, j] + w[i, j + 1] + w[i, j - 1] - 4 * w[i, j]


def oracle_step(s, c):
    """Plate update built as the 5-point Laplacian applied twice."""
    w, wp = s.w_curr, s.w_prev
    size = w.shape[0]
    lap = np.zeros_like(w)
    for i in range(1, size - 1):
        for j in range(1, size - 1):
            lap[i, j] = lap5(w, i, j)
    out = np.zeros_like(w)
    for i in range(GHOSTS + 1, size - GHOSTS - 1):
        for j in range(GHOSTS + 1, size - GHOSTS - 1):
            bilap = lap5(lap, i, j)
            out[i, j] = (
                2 * w[i, j] - wp[i, j] + c.lam * lap[i, j] - c.mu * bilap + c.tau * wp[i, j]
            ) / (1 + c.tau)
    return out


def test_zero_state_stays_zero():
    assert not step_plate(new_plate_state(COEFFS), COEFFS).w_curr.any()


@pytest.mark.parametrize("tau", [0.0, 0.003])
def test_matches_independent_stencil(tau):
    c = dataclasses.replace(COEFFS, tau=tau)
    s = random_state(c, np.random.default_rng(11))
    got = step_plate(s, c).w_curr
    want = oracle_step(s, c)
    inner = (slice(GHOSTS + 1, -GHOSTS - 1),) * 2
    scale = np.abs(s.w_curr).max()
    np.testing.assert_allclose(got[inner], want[inner], rtol=0, atol=64 * np.finfo(float).eps * scale)


def test_unit_load_response():
    c = dataclasses.replace(COEFFS, tau=0.01)
    nxt = step_plate(new_plate_state(c), c, [((10, 20), 1.0)])
    expected = DT**2 / ((1 + c.tau) * c.surface_density * c.dx**2)
    assert nxt.w_curr[10 + GHOSTS, 20 + GHOSTS] == pytest.approx(expected, rel=1e-14)
    assert np.count_nonzero(nxt.w_curr) == 1


def test_edge_loads_rejected():
    with pytest.raises(GridError):
        step_plate(new_plate_state(COEFFS), COEFFS, [((0, 5), 1.0)])


def test_boundary_conditions():
    s = new_plate_state(COEFFS)
    lo = GHOSTS
    hi = s.w_curr.shape[0] - 1 - GHOSTS
    s.w_curr[lo + 1, 10] = 0.3
    s.w_curr[10, hi - 2] = 0.2
    s.w_curr[lo + 1, lo + 1] = 0.7
    s.w_curr[lo, 12] = 5.0
    apply_plate_bcs(s)
    w = s.w_curr
    assert w[lo - 1, 10] == -0.3
    assert w[10, hi + 2] == -0.2
    assert w[lo - 1, lo - 1] == 0.7  # two reflections
    assert w[lo, 12] == 0.0
    assert not apply_plate_bcs(new_plate_state(COEFFS)).w_curr.any()


def test_bcs_hold_after_step():
    s = step_plate(random_state(COEFFS, np.random.default_rng(5)), COEFFS)
    w = s.w_curr
    lo, hi = GHOSTS, w.shape[0] - 1 - GHOSTS
    for edge in (w[lo, :], w[hi, :], w[:, lo], w[:, hi]):
        assert not edge.any()
    for g in (1, 2):
        np.testing.assert_array_equal(w[lo - g, :], -w[lo + g, :])
        np.testing.assert_array_equal(w[:, hi + g], -w[:, hi - g])


@given(a=st.floats(-5, 5), b=st.floats(-5, 5), f=st.floats(-1, 1), seed=st.integers(0, 2**32 - 1))
def test_linearity(a, b, f, seed):
    rng = np.random.default_rng(seed)
    s1, s2 = random_state(COEFFS, rng), random_state(COEFFS, rng)
    combo = PlateState(a * s1.w_prev + b * s2.w_prev, a * s1.w_curr + b * s2.w_curr)
    load = [((7, 9), f)]
    lhs = step_plate(combo, COEFFS, load).w_curr
    rhs = a * step_plate(s1, COEFFS).w_curr + b * step_plate(s2, COEFFS).w_curr
    rhs = rhs + step_plate(new_plate_state(COEFFS), COEFFS, load).w_curr
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-15 * (abs(a) + abs(b) + 1))


def test_divergence_detected():
    s = new_plate_state(COEFFS)
    s.w_curr[10, 10] = np.inf
    with np.errstate(invalid="ignore"), pytest.raises(InstabilityError):
        step_plate(s, COEFFS)


def test_bilinear_on_node():
    nodes, weights = bilinear_stencil((18 / M, 8 / M), M)
    assert nodes[0] == (18, 8)
    np.testing.assert_array_equal(weights, [1.0, 0.0, 0.0, 0.0])
    assert spread_bilinear((18 / M, 8 / M), 1.0, M) == [((18, 8), 1.0)]
    s = random_state(COEFFS, np.random.default_rng(0))
    assert sample_bilinear(s, (18 / M, 8 / M)) == s.w_curr[18 + GHOSTS, 8 + GHOSTS]


def test_bilinear_cell_centre():
    pos = ((10.5) / M, (20.5) / M)
    _, weights = bilinear_stencil(pos, M)
    np.testing.assert_allclose(weights, 0.25, rtol=1e-12)
    s = random_state(COEFFS, np.random.default_rng(0))
    w = s.w_curr
    corners = [w[10 + GHOSTS + a, 20 + GHOSTS + b] for a in (0, 1) for b in (0, 1)]
    assert sample_bilinear(s, pos) == pytest.approx(sum(corners) / 4, rel=1e-12)
    loads = spread_bilinear(pos, 1.0, M)
    assert len(loads) == 4
    assert sum(f for _, f in loads) == pytest.approx(1.0)


@given(x=st.floats(0.03, 0.97), y=st.floats(0.03, 0.97), force=st.floats(-10, 10))
def test_bilinear_weights_match_formula(x, y, force):
    nodes, weights = bilinear_stencil((x, y), M)
    assert weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert (weights >= 0).all()
    gx, gy = x * M, y * M
    for (i, j), wgt in zip(nodes, weights):
        if wgt > 0:
            assert wgt == pytest.approx((1 - abs(gx - i)) * (1 - abs(gy - j)), abs=1e-12)
    spread = dict(spread_bilinear((x, y), force, M))
    for node, wgt in zip(nodes, weights):
        assert spread.get(node, 0.0) == pytest.approx(wgt * force, abs=1e-15)


def test_bilinear_rejects_boundary_touch():
    with pytest.raises(GridError):
        bilinear_stencil((0.01, 0.5), M)
    with pytest.raises(GridError):
        bilinear_stencil((0.5, 1.0), M)


def test_bounded_without_forcing():
    s = random_state(COEFFS, np.random.default_rng(6))
    first = np.abs(s.w_curr).max()
    peak = first
    for _ in range(2000):
        s = step_plate(s, COEFFS)
        peak = max(peak, np.abs(s.w_curr).max())
    assert peak < 50 * first
