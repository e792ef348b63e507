"""String excitation: smooth pluck and stick-slip bow.

The bow model is memoryless Coulomb friction whose coefficient is chosen by
a stick test. At every step the force that would drive the bow node at
exactly the bow speed over the next step is computed from the discrete
scheme. If that force stays below the bow's grip limit the static
coefficient applies, otherwise the dynamic one. The applied force is
always ``-F_n * mu * sign(v_rel)`` with a dead-band sign, spread over three
nodes with a triangular kernel.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConfigError
from .params import GHOSTS, StringCoeffs
from .string_fdtd import StringState, rhs_at, string_velocity_at

BOW_KERNEL = (0.25, 0.5, 0.25)


@dataclass(frozen=True)
class PluckParams:
    amplitude: float = 1.0
    duration: float = 4.55e-3

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ConfigError("must be non-negative", "amplitude")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ConfigError("must be positive", "duration")


@dataclass(frozen=True)
class BowParams:
    speed: float = 2.0e-1
    normal_force: float = 1.0
    max_force: float = 2.5
    mu_static: float = 0.6
    mu_dynamic: float = 0.2
    eps: float = 1.0e-2

    def __post_init__(self):
        for name in ("normal_force", "max_force", "eps", "mu_dynamic"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError("must be positive", name)
        if not math.isfinite(self.speed):
            raise ConfigError("must be finite", "speed")
        if not self.mu_dynamic <= self.mu_static:
            raise ConfigError("must not be below mu_dynamic", "mu_static")


class BowPhase(enum.Enum):
    STICK = "stick"
    SLIP = "slip"


def pluck_force(t: float, p: PluckParams) -> float:
    if t < 0 or t > p.duration:
        return 0.0
    return p.amplitude * math.sin(math.pi * t / p.duration) ** 2


def theoretical_stick_force(
    s: StringState,
    c: StringCoeffs,
    node: int,
    v_bow: float,
    weight: float = BOW_KERNEL[1],
    other_force: float = 0.0,
) -> float:
    """Force that makes node ``node`` move at ``v_bow`` over the next step.

    ``weight`` is the share of the bow force landing on ``node``;
    ``other_force`` is any further load already acting on that node.
    """
    j = node + GHOSTS
    target = (1.0 + c.tau) * (s.u_curr[j] + v_bow * c.dt)
    free = rhs_at(s, c, node) + c.force_gain * other_force
    return (target - free) / (c.force_gain * weight)


def relaxed_sign(x: float, eps: float) -> float:
    """Sign with a closed dead band: zero whenever ``|x| <= eps``."""
    if x > eps:
        return 1.0
    if x < -eps:
        return -1.0
    return 0.0


def bow_force(
    s: StringState,
    c: StringCoeffs,
    p: BowParams,
    phase: BowPhase,
    node: int,
    other_force: float = 0.0,
) -> tuple[float, BowPhase]:
    """Friction force at the bow node and the phase it implies.

    ``phase`` is accepted for symmetry with the caller's bookkeeping; the
    stick test itself carries no memory.
    """
    v_rel = string_velocity_at(s, node, c.dt) - p.speed
    f_star = theoretical_stick_force(s, c, node, p.speed, BOW_KERNEL[1], other_force)
    sign = relaxed_sign(v_rel, p.eps)
    if abs(f_star) < p.max_force:
        return -p.normal_force * p.mu_static * sign, BowPhase.STICK
    return -p.normal_force * p.mu_dynamic * sign, BowPhase.SLIP


def spread_bow(force: float, node: int) -> list[tuple[int, float]]:
    return [(node + d, w * force) for d, w in zip((-1, 0, 1), BOW_KERNEL)]
