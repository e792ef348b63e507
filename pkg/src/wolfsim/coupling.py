"""Spring/damper forces between subsystems and the lumped oscillators.

Sign convention: each force is ``k * (lumped - grid)``. The grid side (string
node, plate node) receives ``+F`` and the lumped mass receives ``-F``, which
makes every coupling an action-reaction pair.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .params import BridgeParams, SuppressorParams


@dataclass
class LumpedState:
    """Bridge and suppressor displacements at the stored time levels.

    ``z_su_prev2`` and the sampled plate history ``w_su_prev``/``w_su_prev2``
    exist only to form the lagged central-difference velocities.
    """

    z_br_prev: float = 0.0
    z_br_curr: float = 0.0
    z_su_prev2: np.ndarray = field(default_factory=lambda: np.zeros(0))
    z_su_prev: np.ndarray = field(default_factory=lambda: np.zeros(0))
    z_su_curr: np.ndarray = field(default_factory=lambda: np.zeros(0))
    w_su_prev2: np.ndarray = field(default_factory=lambda: np.zeros(0))
    w_su_prev: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @classmethod
    def at_rest(cls, n_suppressors: int) -> LumpedState:
        z = lambda: np.zeros(n_suppressors)  # noqa: E731
        return cls(0.0, 0.0, z(), z(), z(), z(), z())


@dataclass(frozen=True)
class CouplingForces:
    string_bridge: float
    body_left: float
    body_right: float
    suppressors: np.ndarray

    @property
    def on_bridge(self) -> float:
        """Sum entering the bridge equation (with a minus sign there)."""
        return self.string_bridge + self.body_left + self.body_right


def lagged_velocity(x_curr: float, x_prev2: float, dt: float) -> float:
    """Central difference centred one step back: (x^n - x^{n-2}) / (2 dt)."""
    return (x_curr - x_prev2) / (2.0 * dt)


def suppressor_force(
    k: float, zeta: float, z: float, w: float, z_vel: float, w_vel: float
) -> float:
    return k * (z - w) + zeta * (z_vel - w_vel)


def compute_forces(
    u_at_br: float,
    z_br: float,
    w_at_feet: tuple[float, float],
    z_su: Sequence[float],
    w_at_su: Sequence[float],
    w_t_at_su: Sequence[float],
    z_su_vel: Sequence[float],
    bridge: BridgeParams,
    suppressors: Sequence[SuppressorParams],
) -> CouplingForces:
    w_left, w_right = w_at_feet
    f_su = np.array(
        [
            suppressor_force(p.stiffness, p.damping, z, w, vz, vw)
            for p, z, w, vz, vw in zip(suppressors, z_su, w_at_su, z_su_vel, w_t_at_su)
        ],
        dtype=float,
    )
    return CouplingForces(
        string_bridge=bridge.k_up * (z_br - u_at_br),
        body_left=bridge.k_left * (z_br - w_left),
        body_right=bridge.k_right * (z_br - w_right),
        suppressors=f_su,
    )


def step_bridge(s: LumpedState, f: CouplingForces, m_br: float, dt: float) -> float:
    """Bridge displacement at the next level."""
    return 2.0 * s.z_br_curr - s.z_br_prev - (dt * dt / m_br) * f.on_bridge


def step_suppressor(z_prev: float, z_curr: float, force: float, m_su: float, dt: float) -> float:
    return 2.0 * z_curr - z_prev - (dt * dt / m_su) * force
