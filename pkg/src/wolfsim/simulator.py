"""Coupled string / bridge / plate / suppressor simulation of single notes.

Each step, in order:

1. excitation force from the level-``n`` string,
2. all spring and damper forces from level-``n`` states,
3. advance string, plate, bridge and suppressors to ``n + 1``,
4. re-impose the boundary conditions,
5. record the plate at the pickup point and the string at the excitation point.

Two engines implement the same arithmetic. ``"numba"`` runs the whole loop
compiled and is the default; ``"numpy"`` builds every step from the public
per-subsystem steppers and exists for cross-checking and for inspecting
intermediate states (e.g. the discrete energy).
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernel
from .analysis import IndicatorParams
from .coupling import (
    LumpedState,
    compute_forces,
    lagged_velocity,
    step_bridge,
    step_suppressor,
)
from .errors import ConfigError, InstabilityError, SimulationError, WolfsimError
from .excitation import (
    BOW_KERNEL,
    BowParams,
    BowPhase,
    PluckParams,
    bow_force,
    pluck_force,
    spread_bow,
)
from .params import (
    GHOSTS,
    BridgeParams,
    PlateCoeffs,
    PlateParams,
    SimGridConfig,
    StringCoeffs,
    StringParams,
    SuppressorParams,
    derive_plate_coeffs,
    derive_string_coeffs,
    fraction_to_index,
)
from .plate_fdtd import (
    PlateState,
    bilinear_stencil,
    new_plate_state,
    scheme_rhs as plate_rhs,
    step_plate,
)
from .string_fdtd import (
    StringState,
    new_string_state,
    scheme_rhs as string_rhs,
    step_string,
)

EXCITATIONS = ("pluck", "bow")
ENGINES = ("numba", "numpy")

Node = tuple[int, int]


@dataclass(frozen=True)
class PhysicalConfig:
    string: StringParams = field(default_factory=StringParams)
    plate: PlateParams = field(default_factory=PlateParams)
    bridge: BridgeParams = field(default_factory=BridgeParams)
    pluck: PluckParams = field(default_factory=PluckParams)
    bow: BowParams = field(default_factory=BowParams)
    grid: SimGridConfig = field(default_factory=SimGridConfig)


@dataclass(frozen=True)
class ScenarioConfig:
    """A full experiment: instrument, notes, excitation and suppressors.

    ``note_lengths`` are the sounding string lengths in metres, one per note;
    notes are numbered from 1 in that order.
    """

    physical: PhysicalConfig = field(default_factory=PhysicalConfig)
    note_lengths: tuple[float, ...] = ()
    excitation: str = "pluck"
    suppressors: tuple[SuppressorParams, ...] = ()
    indicators: IndicatorParams = field(default_factory=IndicatorParams)
    note_frequencies: tuple[float, ...] | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "note_lengths", tuple(float(x) for x in self.note_lengths))
        object.__setattr__(self, "suppressors", tuple(self.suppressors))
        if not self.note_lengths:
            raise ConfigError("at least one note is required", "notes.lengths")
        for k, ell in enumerate(self.note_lengths):
            if not ell > 0:
                raise ConfigError(f"must be positive, got {ell!r}", f"notes.lengths[{k}]")
        if self.excitation not in EXCITATIONS:
            raise ConfigError(f"must be one of {EXCITATIONS}", "excitation.kind")
        if self.indicators.wolf_note > len(self.note_lengths):
            raise ConfigError(
                f"wolf note {self.indicators.wolf_note} but only "
                f"{len(self.note_lengths)} notes",
                "notes.wolf_note",
            )
        if self.note_frequencies is not None:
            object.__setattr__(
                self, "note_frequencies", tuple(float(f) for f in self.note_frequencies)
            )
            if len(self.note_frequencies) != len(self.note_lengths):
                raise ConfigError("need one frequency per length", "notes.frequencies")
        if self.indicators.t_star >= self.physical.grid.total_time:
            raise ConfigError("must precede the end of the simulation", "numerics.t_star")

    @property
    def n_notes(self) -> int:
        return len(self.note_lengths)

    def with_suppressors(self, suppressors: Sequence[SuppressorParams]) -> ScenarioConfig:
        return replace(self, suppressors=tuple(suppressors))

    def only_note(self, note: int) -> ScenarioConfig:
        """Copy reduced to a single note (which becomes note 1)."""
        self._check_note(note)
        freqs = None if self.note_frequencies is None else (self.note_frequencies[note - 1],)
        return replace(
            self,
            note_lengths=(self.note_lengths[note - 1],),
            note_frequencies=freqs,
            indicators=replace(self.indicators, wolf_note=1),
        )

    def _check_note(self, note: int) -> None:
        if not 1 <= note <= self.n_notes:
            raise ConfigError(f"note {note} outside 1..{self.n_notes}", "note")


@dataclass(frozen=True)
class Recording:
    """Waveforms of one note, sampled every time step.

    ``body[n]`` and ``string[n]`` are displacements (m) at time ``(n+1) dt``;
    ``force[n]`` is the excitation force (N) applied during step ``n`` and
    ``stick[n]`` flags steps where the bow stick test held.
    """

    body: np.ndarray
    string: np.ndarray
    force: np.ndarray
    sample_rate: float
    note: int
    length: float
    excitation: str
    stick: np.ndarray | None = None

    def __len__(self) -> int:
        return self.body.size


@dataclass(frozen=True)
class NoteSetup:
    """Everything the loop needs for one note, derived once."""

    string: StringCoeffs
    plate: PlateCoeffs
    bridge_node: int
    exc_node: int
    foot_left: Node
    foot_right: Node
    rec: Node
    su_stencils: tuple[tuple[tuple[Node, ...], np.ndarray], ...]
    n_steps: int

    @property
    def su_nodes(self) -> np.ndarray:
        out = np.zeros((len(self.su_stencils), 4, 2), dtype=np.int64)
        for s, (nodes, _) in enumerate(self.su_stencils):
            out[s] = nodes
        return out

    @property
    def su_weights(self) -> np.ndarray:
        out = np.zeros((len(self.su_stencils), 4))
        for s, (_, weights) in enumerate(self.su_stencils):
            out[s] = weights
        return out


def _plate_node(point, node_count: int) -> Node:
    return (fraction_to_index(point[0], node_count), fraction_to_index(point[1], node_count))


def prepare_note(cfg: ScenarioConfig, note: int) -> NoteSetup:
    cfg._check_note(note)
    phys = cfg.physical
    dt = phys.grid.dt
    sp = replace(phys.string, length=cfg.note_lengths[note - 1])
    sc = derive_string_coeffs(sp, dt)
    pc = derive_plate_coeffs(phys.plate, dt)
    bridge_node = fraction_to_index(phys.bridge.string_attach, sc.node_count)
    exc_node = fraction_to_index(phys.grid.exc_point, sc.node_count)
    if cfg.excitation == "bow" and not 1 < exc_node < sc.intervals - 1:
        raise ConfigError("bow stencil leaves the string interior", "contact_points.exc_point")
    stencils = []
    for s in cfg.suppressors:
        nodes, weights = bilinear_stencil(s.position, pc.intervals)
        stencils.append((tuple(nodes), weights))
    return NoteSetup(
        string=sc,
        plate=pc,
        bridge_node=bridge_node,
        exc_node=exc_node,
        foot_left=_plate_node(phys.bridge.foot_left, pc.node_count),
        foot_right=_plate_node(phys.bridge.foot_right, pc.node_count),
        rec=_plate_node(phys.grid.rec_point, pc.node_count),
        su_stencils=tuple(stencils),
        n_steps=phys.grid.n_steps,
    )


class Simulation:
    """Step-by-step reference engine built from the per-subsystem steppers."""

    def __init__(self, cfg: ScenarioConfig, note: int):
        self.cfg = cfg
        self.note = note
        self.setup = prepare_note(cfg, note)
        self.string = new_string_state(self.setup.string)
        self.plate = new_plate_state(self.setup.plate)
        self.lumped = LumpedState.at_rest(len(cfg.suppressors))
        self.phase = BowPhase.STICK
        self.n = 0

    @property
    def dt(self) -> float:
        return self.cfg.physical.grid.dt

    def _sample(self, w: np.ndarray, s: int) -> float:
        nodes, weights = self.setup.su_stencils[s]
        value = 0.0
        for (i, j), wgt in zip(nodes, weights):
            value += wgt * w[i + GHOSTS, j + GHOSTS]
        return value

    def step(self) -> tuple[float, bool]:
        """Advance one step; returns the excitation force and stick flag."""
        su = self.setup
        phys = self.cfg.physical
        dt = self.dt
        lumped = self.lumped
        w = self.plate.w_curr
        u = self.string.u_curr
        G = GHOSTS

        w_su = [self._sample(w, s) for s in range(len(self.cfg.suppressors))]
        w_su_vel = [lagged_velocity(x, xp2, dt) for x, xp2 in zip(w_su, lumped.w_su_prev2)]
        z_su_vel = [
            lagged_velocity(x, xp2, dt) for x, xp2 in zip(lumped.z_su_curr, lumped.z_su_prev2)
        ]
        forces = compute_forces(
            u[su.bridge_node + G],
            lumped.z_br_curr,
            (w[su.foot_left[0] + G, su.foot_left[1] + G], w[su.foot_right[0] + G, su.foot_right[1] + G]),
            lumped.z_su_curr,
            w_su,
            w_su_vel,
            z_su_vel,
            phys.bridge,
            self.cfg.suppressors,
        )

        stick = False
        if self.cfg.excitation == "pluck":
            f_exc = pluck_force(self.n * dt, phys.pluck)
            string_loads = [(su.exc_node, f_exc)]
        else:
            other = forces.string_bridge if su.bridge_node == su.exc_node else 0.0
            f_exc, self.phase = bow_force(
                self.string, su.string, phys.bow, self.phase, su.exc_node, other
            )
            stick = self.phase is BowPhase.STICK
            string_loads = spread_bow(f_exc, su.exc_node)
        string_loads.append((su.bridge_node, forces.string_bridge))

        plate_loads = [(su.foot_left, forces.body_left), (su.foot_right, forces.body_right)]
        for s, f in enumerate(forces.suppressors):
            nodes, weights = su.su_stencils[s]
            plate_loads.extend((node, wgt * f) for node, wgt in zip(nodes, weights) if wgt != 0.0)

        self.string = step_string(self.string, su.string, string_loads)
        self.plate = step_plate(self.plate, su.plate, plate_loads)

        z_br_next = step_bridge(lumped, forces, phys.bridge.mass, dt)
        z_su_next = np.array(
            [
                step_suppressor(zp, zc, f, p.mass, dt)
                for zp, zc, f, p in zip(
                    lumped.z_su_prev, lumped.z_su_curr, forces.suppressors, self.cfg.suppressors
                )
            ],
            dtype=float,
        )
        self.lumped = LumpedState(
            z_br_prev=lumped.z_br_curr,
            z_br_curr=z_br_next,
            z_su_prev2=lumped.z_su_prev,
            z_su_prev=lumped.z_su_curr,
            z_su_curr=z_su_next,
            w_su_prev2=lumped.w_su_prev,
            w_su_prev=np.array(w_su, dtype=float),
        )
        if not np.isfinite(z_br_next) or abs(z_br_next) > _kernel.RUNAWAY:
            raise InstabilityError("bridge displacement diverged", self.n + 1)
        self.n += 1
        return f_exc, stick

    def readout(self) -> tuple[float, float]:
        su = self.setup
        G = GHOSTS
        return (
            float(self.plate.w_curr[su.rec[0] + G, su.rec[1] + G]),
            float(self.string.u_curr[su.exc_node + G]),
        )

    def energy(self) -> float:
        """Discrete energy between the two stored levels.

        Conserved by the undamped, unforced scheme up to rounding: kinetic
        terms use the last step's difference quotient, potential terms the
        product of the two levels.
        """
        su = self.setup
        phys = self.cfg.physical
        dt = self.dt
        G = GHOSTS
        sc, pc = su.string, su.plate

        u1, u0 = self.string.u_curr, self.string.u_prev
        op_u0 = string_rhs(StringState(np.zeros_like(u0), u0), sc) - 2.0 * u0
        si = slice(G + 1, u1.size - G - 1)
        e = 0.5 * sc.node_mass / dt**2 * float(np.sum((u1[si] - u0[si]) ** 2))
        e -= 0.5 * sc.node_mass / dt**2 * float(np.dot(u1[si], op_u0[si]))

        w1, w0 = self.plate.w_curr, self.plate.w_prev
        op_w0 = plate_rhs(PlateState(np.zeros_like(w0), w0), pc) - 2.0 * w0
        pi = (slice(G + 1, w1.shape[0] - G - 1),) * 2
        e += 0.5 * pc.node_mass / dt**2 * float(np.sum((w1[pi] - w0[pi]) ** 2))
        e -= 0.5 * pc.node_mass / dt**2 * float(np.sum(w1[pi] * op_w0[pi]))

        lp = self.lumped
        br = phys.bridge
        e += 0.5 * br.mass * ((lp.z_br_curr - lp.z_br_prev) / dt) ** 2
        j = su.bridge_node + G
        e += 0.5 * br.k_up * (lp.z_br_curr - u1[j]) * (lp.z_br_prev - u0[j])
        for k, node in ((br.k_left, su.foot_left), (br.k_right, su.foot_right)):
            a, b = node[0] + G, node[1] + G
            e += 0.5 * k * (lp.z_br_curr - w1[a, b]) * (lp.z_br_prev - w0[a, b])
        for s, p in enumerate(self.cfg.suppressors):
            e += 0.5 * p.mass * ((lp.z_su_curr[s] - lp.z_su_prev[s]) / dt) ** 2
            e += (
                0.5
                * p.stiffness
                * (lp.z_su_curr[s] - self._sample(w1, s))
                * (lp.z_su_prev[s] - self._sample(w0, s))
            )
        return e

    def run(self, n_steps: int | None = None) -> Recording:
        n_steps = self.setup.n_steps if n_steps is None else n_steps
        body = np.zeros(n_steps)
        string = np.zeros(n_steps)
        force = np.zeros(n_steps)
        stick = np.zeros(n_steps, dtype=bool)
        for n in range(n_steps):
            force[n], stick[n] = self.step()
            body[n], string[n] = self.readout()
        return _recording(self.cfg, self.note, body, string, force, stick)


def _recording(cfg, note, body, string, force, stick) -> Recording:
    return Recording(
        body=body,
        string=string,
        force=force,
        sample_rate=cfg.physical.grid.sample_rate,
        note=note,
        length=cfg.note_lengths[note - 1],
        excitation=cfg.excitation,
        stick=stick if cfg.excitation == "bow" else None,
    )


def _run_compiled(cfg: ScenarioConfig, note: int, n_steps: int | None) -> Recording:
    su = prepare_note(cfg, note)
    phys = cfg.physical
    sc, pc, br = su.string, su.plate, phys.bridge
    pl, bw = phys.pluck, phys.bow
    sups = cfg.suppressors
    n_steps = su.n_steps if n_steps is None else n_steps
    body, string, force, stick, status = _kernel.run_kernel(
        n_steps,
        phys.grid.dt,
        sc.intervals, sc.lam, sc.mu, sc.tau, sc.force_gain, su.bridge_node, su.exc_node,
        pc.intervals, pc.lam, pc.mu, pc.tau, pc.force_gain,
        np.array(su.foot_left, dtype=np.int64),
        np.array(su.foot_right, dtype=np.int64),
        np.array(su.rec, dtype=np.int64),
        br.k_up, br.k_left, br.k_right, br.mass,
        su.su_nodes,
        su.su_weights,
        np.array([s.stiffness for s in sups], dtype=float),
        np.array([s.damping for s in sups], dtype=float),
        np.array([s.mass for s in sups], dtype=float),
        _kernel.PLUCK if cfg.excitation == "pluck" else _kernel.BOW,
        pl.amplitude, pl.duration,
        bw.speed, bw.normal_force, bw.max_force, bw.mu_static, bw.mu_dynamic, bw.eps,
        BOW_KERNEL[1],
    )
    if status >= 0:
        raise InstabilityError("state diverged", int(status))
    return _recording(cfg, note, body, string, force, stick.astype(bool))


def run_simulation(
    cfg: ScenarioConfig, note: int, engine: str = "numba", n_steps: int | None = None
) -> Recording:
    """Simulate note ``note`` (1-based) from rest.

    ``n_steps`` overrides the configured duration, mainly for tests.
    """
    if engine == "numba":
        return _run_compiled(cfg, note, n_steps)
    if engine == "numpy":
        return Simulation(cfg, note).run(n_steps)
    raise ConfigError(f"unknown engine {engine!r}; choose from {ENGINES}", "engine")


def run_all_notes(cfg: ScenarioConfig, engine: str = "numba") -> list[Recording]:
    """Every note of the scenario, in order; failures carry the note number."""
    out = []
    for note in range(1, cfg.n_notes + 1):
        try:
            out.append(run_simulation(cfg, note, engine))
        except WolfsimError as exc:
            raise SimulationError(note, exc) from exc
    return out
