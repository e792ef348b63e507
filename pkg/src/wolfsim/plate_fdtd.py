"""Explicit finite-difference stepping of the stiff square plate.

Membrane tension enters through the 5-point Laplacian, bending through the
13-point bi-Laplacian. Edges are simply supported: edge nodes are zero and a
two-deep ghost ring holds sign-flipped mirrors of the interior. The first
array axis is ``x``, the second ``y``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .errors import GridError
from .params import GHOSTS, PlateCoeffs, Point
from .string_fdtd import check_finite

Node = tuple[int, int]

# Positions closer than this (in grid units) to a node are treated as on it.
SNAP_TOLERANCE = 1e-9


@dataclass
class PlateState:
    w_prev: np.ndarray
    w_curr: np.ndarray
    n: int = 0


def new_plate_state(coeffs: PlateCoeffs) -> PlateState:
    size = coeffs.node_count + 2 * GHOSTS
    return PlateState(np.zeros((size, size)), np.zeros((size, size)), 0)


def _apply_bcs(w: np.ndarray) -> None:
    lo = GHOSTS
    hi = w.shape[0] - 1 - GHOSTS
    w[lo, :] = 0.0
    w[hi, :] = 0.0
    w[:, lo] = 0.0
    w[:, hi] = 0.0
    for g in range(1, GHOSTS + 1):
        w[lo - g, :] = -w[lo + g, :]
        w[hi + g, :] = -w[hi - g, :]
    # Columns after rows: corner ghosts pick up both reflections.
    for g in range(1, GHOSTS + 1):
        w[:, lo - g] = -w[:, lo + g]
        w[:, hi + g] = -w[:, hi - g]


def apply_plate_bcs(s: PlateState) -> PlateState:
    _apply_bcs(s.w_prev)
    _apply_bcs(s.w_curr)
    return s


def scheme_rhs(s: PlateState, c: PlateCoeffs) -> np.ndarray:
    """Bracketed plate update on the interior, force terms excluded."""
    w, wp = s.w_curr, s.w_prev
    lam, mu, tau = c.lam, c.mu, c.tau
    m = w.shape[0]

    def sl(di: int, dj: int):
        return (
            slice(GHOSTS + 1 + di, m - GHOSTS - 1 + di),
            slice(GHOSTS + 1 + dj, m - GHOSTS - 1 + dj),
        )

    C = w[sl(0, 0)]
    E, W_, N, S = w[sl(1, 0)], w[sl(-1, 0)], w[sl(0, 1)], w[sl(0, -1)]
    NE, SE, NW, SW = w[sl(1, 1)], w[sl(1, -1)], w[sl(-1, 1)], w[sl(-1, -1)]
    EE, WW, NN, SS = w[sl(2, 0)], w[sl(-2, 0)], w[sl(0, 2)], w[sl(0, -2)]
    P = wp[sl(0, 0)]
    out = np.zeros_like(w)
    out[sl(0, 0)] = (
        2.0 * C
        - P
        + lam * (E - 2.0 * C + W_ + N - 2.0 * C + S)
        - 20.0 * mu * C
        + 8.0 * mu * (E + W_ + N + S)
        - 2.0 * mu * (NE + SE + NW + SW)
        - mu * (EE + WW + NN + SS)
        + tau * P
    )
    return out


def load_grid(size: int, loads: Iterable[tuple[Node, float]], intervals: int) -> np.ndarray:
    f = np.zeros((size, size))
    for (i, j), force in loads:
        if not (0 < i < intervals and 0 < j < intervals):
            raise GridError(f"plate load at node ({i}, {j}) is not interior")
        f[i + GHOSTS, j + GHOSTS] += force
    return f


def step_plate(
    s: PlateState, c: PlateCoeffs, loads: Iterable[tuple[Node, float]] = ()
) -> PlateState:
    f = load_grid(s.w_curr.shape[0], loads, c.intervals)
    rhs = scheme_rhs(s, c)
    w_next = np.zeros_like(s.w_curr)
    m = w_next.shape[0]
    i = (slice(GHOSTS + 1, m - GHOSTS - 1),) * 2
    w_next[i] = (rhs[i] + c.force_gain * f[i]) / (1.0 + c.tau)
    _apply_bcs(w_next)
    check_finite(w_next, s.n + 1, "plate")
    return PlateState(s.w_curr, w_next, s.n + 1)


def bilinear_stencil(pos: Point, intervals: int) -> tuple[list[Node], np.ndarray]:
    """Four surrounding nodes and their bilinear weights for ``pos``.

    Always returns four entries; weights of nodes not touched by an on-grid
    coordinate are exactly zero, so an on-node position reproduces a plain
    single-node read or load bit for bit.
    """
    coords = []
    for axis, frac in zip("xy", pos):
        if not (0.0 < frac < 1.0):
            raise GridError(f"{axis} = {frac!r} outside (0, 1)")
        g = frac * intervals
        if abs(g - round(g)) < SNAP_TOLERANCE:
            g = float(round(g))
        base = math.floor(g)
        offset = g - base
        if base == intervals:
            base, offset = intervals - 1, 1.0
        coords.append((base, offset))
    (i0, ax), (j0, ay) = coords
    nodes = [(i0, j0), (i0 + 1, j0), (i0, j0 + 1), (i0 + 1, j0 + 1)]
    weights = np.array([(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay])
    for (i, j), wgt in zip(nodes, weights):
        if wgt != 0.0 and not (0 < i < intervals and 0 < j < intervals):
            raise GridError(f"position {pos!r} touches boundary node ({i}, {j})")
    return nodes, weights


def sample_bilinear(s: PlateState, pos: Point, intervals: int | None = None) -> float:
    """Bilinear read of the current plate displacement at ``pos``."""
    if intervals is None:
        intervals = s.w_curr.shape[0] - 2 * GHOSTS - 1
    nodes, weights = bilinear_stencil(pos, intervals)
    value = 0.0
    for (i, j), wgt in zip(nodes, weights):
        value += wgt * s.w_curr[i + GHOSTS, j + GHOSTS]
    return value


def spread_bilinear(pos: Point, force: float, intervals: int) -> list[tuple[Node, float]]:
    """Distribute a point force over the surrounding nodes (adjoint of sampling)."""
    nodes, weights = bilinear_stencil(pos, intervals)
    return [(node, wgt * force) for node, wgt in zip(nodes, weights) if wgt != 0.0]
