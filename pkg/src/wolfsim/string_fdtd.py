"""Explicit finite-difference stepping of the stiff string.

The update is the damped leapfrog scheme with a 3-point tension stencil and a
5-point bending stencil. Simply supported ends are imposed by zeroing the
boundary nodes and mirroring interior values with a sign flip into the
ghost nodes.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .errors import GridError, InstabilityError
from .params import GHOSTS, StringCoeffs

# Any displacement beyond this is treated as a blown-up scheme.
RUNAWAY_LIMIT = 1.0e3


@dataclass
class StringState:
    """Two time levels of string displacement, ghosts included.

    Physical node ``k`` is stored at ``u[k + GHOSTS]``.
    """

    u_prev: np.ndarray
    u_curr: np.ndarray
    n: int = 0

    @property
    def interior(self) -> np.ndarray:
        return self.u_curr[GHOSTS:-GHOSTS]


def new_string_state(coeffs: StringCoeffs) -> StringState:
    size = coeffs.node_count + 2 * GHOSTS
    return StringState(np.zeros(size), np.zeros(size), 0)


def _apply_bcs(u: np.ndarray) -> None:
    lo = GHOSTS
    hi = u.shape[0] - 1 - GHOSTS
    u[lo] = 0.0
    u[hi] = 0.0
    for g in range(1, GHOSTS + 1):
        u[lo - g] = -u[lo + g]
        u[hi + g] = -u[hi - g]


def apply_string_bcs(s: StringState) -> StringState:
    """Impose the simply supported conditions on both stored levels, in place."""
    _apply_bcs(s.u_prev)
    _apply_bcs(s.u_curr)
    return s


def scheme_rhs(s: StringState, c: StringCoeffs) -> np.ndarray:
    """Bracketed update of every interior node, without the force terms.

    Entries outside the interior are left at zero.
    """
    u, up = s.u_curr, s.u_prev
    lam, mu, tau = c.lam, c.mu, c.tau
    centre = 2.0 - 2.0 * lam - 6.0 * mu
    i = slice(GHOSTS + 1, u.shape[0] - GHOSTS - 1)
    ip1 = slice(GHOSTS + 2, u.shape[0] - GHOSTS)
    im1 = slice(GHOSTS, u.shape[0] - GHOSTS - 2)
    ip2 = slice(GHOSTS + 3, u.shape[0] - GHOSTS + 1)
    im2 = slice(GHOSTS - 1, u.shape[0] - GHOSTS - 3)
    out = np.zeros_like(u)
    out[i] = (
        centre * u[i]
        + lam * (u[ip1] + u[im1])
        - mu * (u[ip2] - 4.0 * u[ip1] - 4.0 * u[im1] + u[im2])
        + (tau - 1.0) * up[i]
    )
    return out


def rhs_at(s: StringState, c: StringCoeffs, k: int) -> float:
    """Scalar form of :func:`scheme_rhs` at physical node ``k``."""
    u, up = s.u_curr, s.u_prev
    lam, mu, tau = c.lam, c.mu, c.tau
    j = k + GHOSTS
    centre = 2.0 - 2.0 * lam - 6.0 * mu
    return (
        centre * u[j]
        + lam * (u[j + 1] + u[j - 1])
        - mu * (u[j + 2] - 4.0 * u[j + 1] - 4.0 * u[j - 1] + u[j - 2])
        + (tau - 1.0) * up[j]
    )


def load_vector(size: int, loads: Iterable[tuple[int, float]], intervals: int) -> np.ndarray:
    f = np.zeros(size)
    for k, force in loads:
        if not 0 < k < intervals:
            raise GridError(f"string load at node {k} is not interior (0 < k < {intervals})")
        f[k + GHOSTS] += force
    return f


def check_finite(u: np.ndarray, step: int, what: str) -> None:
    if not np.isfinite(u).all():
        raise InstabilityError(f"non-finite {what} displacement", step)
    if np.abs(u).max() > RUNAWAY_LIMIT:
        raise InstabilityError(f"{what} displacement exceeds {RUNAWAY_LIMIT:g} m", step)


def step_string(
    s: StringState, c: StringCoeffs, loads: Iterable[tuple[int, float]] = ()
) -> StringState:
    """Advance one time step; ``loads`` are ``(node, newtons)`` pairs."""
    f = load_vector(s.u_curr.shape[0], loads, c.intervals)
    rhs = scheme_rhs(s, c)
    u_next = np.zeros_like(s.u_curr)
    i = slice(GHOSTS + 1, u_next.shape[0] - GHOSTS - 1)
    u_next[i] = (rhs[i] + c.force_gain * f[i]) / (1.0 + c.tau)
    _apply_bcs(u_next)
    check_finite(u_next, s.n + 1, "string")
    return StringState(s.u_curr, u_next, s.n + 1)


def string_velocity_at(s: StringState, k: int, dt: float) -> float:
    """Backward-difference velocity of physical node ``k`` at the current level."""
    j = k + GHOSTS
    return (s.u_curr[j] - s.u_prev[j]) / dt
