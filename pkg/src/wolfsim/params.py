"""Physical parameters, derived scheme coefficients and grid indexing.

Every dataclass here is frozen and validated on construction; defaults are
the reference cello values (C string, square spruce-like plate) used
throughout the package. All quantities are SI.

Grid convention: a string of length ``ell`` is cut into ``intervals`` equal
cells, giving ``node_count = intervals + 1`` physical nodes numbered
``0 .. intervals``; nodes ``0`` and ``intervals`` are the simply supported
boundary nodes. Arrays carry two ghost nodes beyond each boundary, so
physical node ``k`` lives at array index ``k + GHOSTS``. The plate uses the
same convention along both axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, GridError

GHOSTS = 2
MIN_INTERVALS = 8

Point = tuple[float, float]


def _positive(obj, *names: str) -> None:
    for name in names:
        value = getattr(obj, name)
        if not (math.isfinite(value) and value > 0):
            raise ConfigError(f"must be a positive finite number, got {value!r}", name)


def _nonnegative(obj, *names: str) -> None:
    for name in names:
        value = getattr(obj, name)
        if not (math.isfinite(value) and value >= 0):
            raise ConfigError(f"must be a non-negative finite number, got {value!r}", name)


def _fraction(value: float, name: str) -> None:
    if not (0.0 < value < 1.0):
        raise ConfigError(f"must lie strictly inside (0, 1), got {value!r}", name)


def _point(obj, name: str) -> None:
    point = getattr(obj, name)
    if len(point) != 2:
        raise ConfigError(f"must be an (x, y) pair, got {point!r}", name)
    for axis, value in zip("xy", point):
        _fraction(value, f"{name}.{axis}")


@dataclass(frozen=True)
class StringParams:
    tension: float = 1.2e2
    density: float = 7.8e3
    area: float = 1.8e-6
    young: float = 2.0e11
    second_moment: float = 9.8e-14
    damping: float = 0.0
    length: float = 0.197

    def __post_init__(self):
        _positive(self, "tension", "density", "area", "young", "second_moment", "length")
        _nonnegative(self, "damping")

    @property
    def linear_density(self) -> float:
        return self.density * self.area


@dataclass(frozen=True)
class PlateParams:
    side: float = 5.0e-1
    membrane_tension: float = 7.5e4
    density: float = 4.7e2
    young: float = 1.0e10
    thickness: float = 4.0e-3
    poisson: float = 0.25
    damping: float = 0.0

    def __post_init__(self):
        _positive(self, "side", "membrane_tension", "density", "young", "thickness")
        _nonnegative(self, "damping")
        if not (0.0 <= self.poisson < 0.5):
            raise ConfigError(f"must satisfy 0 <= nu < 0.5, got {self.poisson!r}", "poisson")

    @property
    def surface_density(self) -> float:
        return self.density * self.thickness

    @property
    def flexural_rigidity(self) -> float:
        """D = E h^3 / (12 (1 - nu^2)), in N m."""
        return self.young * self.thickness**3 / (12.0 * (1.0 - self.poisson**2))


@dataclass(frozen=True)
class BridgeParams:
    mass: float = 2.0e-2
    k_up: float = 4.9e2
    k_left: float = 7.0e4
    k_right: float = 3.0e4
    string_attach: float = 0.70
    foot_left: Point = (0.42, 0.48)
    foot_right: Point = (0.42, 0.52)

    def __post_init__(self):
        _positive(self, "mass", "k_up", "k_left", "k_right")
        _fraction(self.string_attach, "string_attach")
        _point(self, "foot_left")
        _point(self, "foot_right")


@dataclass(frozen=True)
class SuppressorParams:
    """Tuned mass damper attached to the plate at ``position``."""

    position: Point = (0.70, 0.49)
    mass: float = 8.5e-3
    frequency: float = 246.9
    damping: float = 2.1

    def __post_init__(self):
        _positive(self, "mass", "frequency")
        _nonnegative(self, "damping")
        _point(self, "position")

    @property
    def stiffness(self) -> float:
        return suppressor_stiffness(self.mass, self.frequency)


@dataclass(frozen=True)
class SimGridConfig:
    dt: float = 5.7e-6
    total_time: float = 1.0
    exc_point: float = 0.50
    rec_point: Point = (0.42, 0.18)

    def __post_init__(self):
        _positive(self, "dt", "total_time")
        if self.total_time <= self.dt:
            raise ConfigError("must exceed the time step", "total_time")
        _fraction(self.exc_point, "exc_point")
        _point(self, "rec_point")

    @property
    def n_steps(self) -> int:
        return int(round(self.total_time / self.dt))

    @property
    def sample_rate(self) -> float:
        return 1.0 / self.dt


@dataclass(frozen=True)
class StringCoeffs:
    wave_speed: float
    bending: float
    dx_min: float
    dx: float
    intervals: int
    lam: float
    mu: float
    tau: float
    linear_density: float
    dt: float

    @property
    def node_count(self) -> int:
        return self.intervals + 1

    @property
    def force_gain(self) -> float:
        """Displacement increment per newton injected at one node."""
        return self.dt**2 / (self.linear_density * self.dx)

    @property
    def node_mass(self) -> float:
        return self.linear_density * self.dx


@dataclass(frozen=True)
class PlateCoeffs:
    wave_speed: float
    bending: float
    rigidity: float
    dx_min: float
    dx: float
    intervals: int
    lam: float
    mu: float
    tau: float
    surface_density: float
    dt: float

    @property
    def node_count(self) -> int:
        return self.intervals + 1

    @property
    def force_gain(self) -> float:
        return self.dt**2 / (self.surface_density * self.dx**2)

    @property
    def node_mass(self) -> float:
        return self.surface_density * self.dx**2


@dataclass(frozen=True)
class DiscreteCoeffs:
    string: StringCoeffs
    plate: PlateCoeffs


def string_dx_min(wave_speed: float, bending: float, dt: float) -> float:
    """Smallest stable string spacing: the root of lam + 4 mu = 1."""
    a = (wave_speed * dt) ** 2
    return math.sqrt((a + math.sqrt(a * a + 16.0 * (bending * dt) ** 2)) / 2.0)


def plate_dx_min(wave_speed: float, bending: float, dt: float) -> float:
    return max(math.sqrt(2.0) * wave_speed * dt, 2.0 * math.sqrt(bending * dt))


def _intervals(length: float, dx_min: float, what: str) -> int:
    intervals = math.floor(length / dx_min)
    if intervals < MIN_INTERVALS:
        raise GridError(
            f"{what} grid has {intervals} intervals (< {MIN_INTERVALS}); "
            "increase the length or reduce the time step"
        )
    return intervals


def derive_string_coeffs(p: StringParams, dt: float) -> StringCoeffs:
    if not dt > 0:
        raise ConfigError("time step must be positive", "dt")
    rho_a = p.linear_density
    c = math.sqrt(p.tension / rho_a)
    r = math.sqrt(p.young * p.second_moment / rho_a)
    dx_min = string_dx_min(c, r, dt)
    intervals = _intervals(p.length, dx_min, "string")
    dx = p.length / intervals
    return StringCoeffs(
        wave_speed=c,
        bending=r,
        dx_min=dx_min,
        dx=dx,
        intervals=intervals,
        lam=(c * dt / dx) ** 2,
        mu=(r * dt / dx**2) ** 2,
        tau=0.5 * p.damping * dt,
        linear_density=rho_a,
        dt=dt,
    )


def derive_plate_coeffs(p: PlateParams, dt: float) -> PlateCoeffs:
    if not dt > 0:
        raise ConfigError("time step must be positive", "dt")
    rho_h = p.surface_density
    D = p.flexural_rigidity
    c = math.sqrt(p.membrane_tension / rho_h)
    r = math.sqrt(D / rho_h)
    dx_min = plate_dx_min(c, r, dt)
    intervals = _intervals(p.side, dx_min, "plate")
    dx = p.side / intervals
    return PlateCoeffs(
        wave_speed=c,
        bending=r,
        rigidity=D,
        dx_min=dx_min,
        dx=dx,
        intervals=intervals,
        lam=(c * dt / dx) ** 2,
        mu=(r * dt / dx**2) ** 2,
        tau=0.5 * p.damping * dt,
        surface_density=rho_h,
        dt=dt,
    )


def suppressor_stiffness(mass: float, frequency: float) -> float:
    """Spring constant that tunes ``mass`` to ``frequency`` (Hz)."""
    if not (mass > 0 and frequency > 0):
        raise ConfigError("mass and frequency must be positive")
    return mass * (2.0 * math.pi * frequency) ** 2


def fraction_to_index(frac: float, node_count: int) -> int:
    """Nearest physical node to ``frac`` of the span; must be interior.

    Halves round up, so the result does not depend on banker's rounding.
    """
    if not (0.0 < frac < 1.0):
        raise GridError(f"fraction {frac!r} outside (0, 1)")
    index = math.floor(frac * (node_count - 1) + 0.5)
    if index <= 0 or index >= node_count - 1:
        raise GridError(f"fraction {frac!r} snaps to boundary node {index} of {node_count}")
    return index
