"""Scenario synthesis for backscatter-tag robot networks.

Generates ground-truth trajectories and per-identity received traces.  A
receiver robot carries a ring of passive backscatter tags; transmitter
robots announce one or more identities, and each announcement produces one
trace per update period.  Tag reflections follow the two-segment free-space
budget

    P_refl = P_t * G_t / (4 pi d_t^2) * lam^2 * G_r / (16 pi^2 d_r^2) * T

with the tag's scattering behaviour lumped into the scalar transfer T.
A Sybil attacker re-announces under several identities, optionally scaling
its transmit power per identity, but it cannot move the phantom: all of its
identities radiate from the same antenna and therefore see (nearly) the
same tag geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    GeometryError,
    IdentityError,
    ParameterError,
    ShapeError,
    TrajectoryError,
    TrajectoryRangeError,
)

DEFAULT_TAG_TRANSFER = 0.05
DEFAULT_AMBIENT_W = 1e-6
DEFAULT_SNR_DB = 20.0
DEFAULT_CODE_BITS = 64
DEFAULT_SAMPLES_PER_BIT = 8
DEFAULT_SAMPLE_RATE_HZ = 8000.0
DEFAULT_PERIOD_S = 0.6
DEFAULT_SLOT_SPACING_S = 0.02

# Guard lengths are drawn in units of one full code span; a trace is always
# five spans long so file sizes stay uniform while the code position varies.
TRACE_SPANS = 5
MIN_GUARD_SPANS = 1


def _positive(name, value):
    if not (value > 0) or not math.isfinite(value):
        raise ParameterError(f"{name} must be strictly positive, got {value!r}")
    return float(value)


def _readonly(obj, name, arr):
    arr.flags.writeable = False
    object.__setattr__(obj, name, arr)


@dataclass(frozen=True)
class ChannelParams:
    """Propagation constants for the tag reflection budget.

    ``tag_gain`` and ``reflection_coeff`` describe the tag itself; they enter
    the power budget only through the lumped transfer ``tag_transfer``, which
    stands in for the full scattering term T(lam, G_tag, Gamma).
    """

    wavelength_m: float = 0.125
    tx_gain: float = 1.0
    rx_gain: float = 1.0
    tag_gain: float = 1.0
    reflection_coeff: float = 1.0
    tag_transfer: float = DEFAULT_TAG_TRANSFER

    def __post_init__(self):
        for name in ("wavelength_m", "tx_gain", "rx_gain", "tag_gain",
                     "reflection_coeff"):
            _positive(name, getattr(self, name))
        # zero transfer is allowed: it models a disabled tag array and
        # yields ambient-only traces
        if not (self.tag_transfer >= 0) or not math.isfinite(self.tag_transfer):
            raise ParameterError(
                f"tag_transfer must be >= 0, got {self.tag_transfer!r}")
        if self.reflection_coeff > 1.0:
            raise ParameterError(
                f"reflection_coeff must be <= 1 (passive tag), got {self.reflection_coeff}")


@dataclass(frozen=True)
class TagLayout:
    """Positions of the K tags in the receiver's body frame (meters)."""

    tag_positions: np.ndarray
    ring_radius_m: float

    def __post_init__(self):
        pos = np.asarray(self.tag_positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise GeometryError(f"tag_positions must be (K, 2), got {pos.shape}")
        if pos.shape[0] < 2:
            raise GeometryError(f"need at least 2 tags, got {pos.shape[0]}")
        _positive("ring_radius_m", self.ring_radius_m)
        radii = np.hypot(pos[:, 0], pos[:, 1])
        # 1 mm mounting tolerance on the ring
        if np.any(np.abs(radii - self.ring_radius_m) > 1e-3):
            raise GeometryError(
                "tag positions must sit on the ring within 1 mm; "
                f"radii {radii} vs nominal {self.ring_radius_m}")
        _readonly(self, "tag_positions", pos)

    @property
    def n_tags(self) -> int:
        return self.tag_positions.shape[0]

    @property
    def tag_ranges_m(self) -> np.ndarray:
        """Tag-to-receiver-antenna distances d_r (antenna at body origin)."""
        return np.hypot(self.tag_positions[:, 0], self.tag_positions[:, 1])

    @classmethod
    def regular_ring(cls, n_tags: int, ring_radius_m: float = 0.12) -> "TagLayout":
        """Evenly spaced tags on a circle, first tag on the +x axis."""
        if n_tags < 2:
            raise GeometryError(f"need at least 2 tags, got {n_tags}")
        theta = 2.0 * np.pi * np.arange(n_tags) / n_tags
        pos = ring_radius_m * np.column_stack([np.cos(theta), np.sin(theta)])
        return cls(tag_positions=pos, ring_radius_m=ring_radius_m)


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped 2-D waypoints traversed at a fixed nominal speed.

    Consecutive waypoints are joined by straight segments walked at
    ``speed_mps`` (within 1%).  Segments with zero displacement are dwells
    and are exempt from the speed check, so a parked robot is expressed as
    two identical positions at different times.
    """

    waypoints: np.ndarray
    speed_mps: float

    def __post_init__(self):
        wp = np.asarray(self.waypoints, dtype=np.float64)
        if wp.ndim != 2 or wp.shape[1] != 3:
            raise TrajectoryError(f"waypoints must be (n, 3) rows of (t, x, y), got {wp.shape}")
        if wp.shape[0] < 2:
            raise TrajectoryError("need at least 2 waypoints")
        _positive("speed_mps", self.speed_mps)
        dt = np.diff(wp[:, 0])
        if np.any(dt <= 0):
            raise TrajectoryError("waypoint times must be strictly increasing")
        seg = np.hypot(np.diff(wp[:, 1]), np.diff(wp[:, 2]))
        moving = seg > 0
        speeds = seg[moving] / dt[moving]
        if speeds.size and np.any(np.abs(speeds / self.speed_mps - 1.0) > 0.01):
            raise TrajectoryError(
                f"segment speeds {speeds} deviate more than 1% from {self.speed_mps} m/s")
        _readonly(self, "waypoints", wp)

    @property
    def t_min(self) -> float:
        return float(self.waypoints[0, 0])

    @property
    def t_max(self) -> float:
        return float(self.waypoints[-1, 0])

    @classmethod
    def from_path(cls, points, speed_mps: float, t0: float = 0.0,
                  dwell_s: float = 0.0) -> "Trajectory":
        """Build waypoint times from cumulative path length at constant speed.

        ``dwell_s`` inserts a hold at the final point, which is convenient for
        padding a path out to a scenario horizon.
        """
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise TrajectoryError(f"points must be (n, 2), got {pts.shape}")
        _positive("speed_mps", speed_mps)
        seg = np.hypot(*np.diff(pts, axis=0).T) if pts.shape[0] > 1 else np.array([])
        times = t0 + np.concatenate([[0.0], np.cumsum(seg)]) / speed_mps
        wp = np.column_stack([times, pts])
        if dwell_s > 0:
            wp = np.vstack([wp, [times[-1] + dwell_s, pts[-1, 0], pts[-1, 1]]])
        return cls(waypoints=wp, speed_mps=speed_mps)


@dataclass(frozen=True)
class RobotAgent:
    """One physical transmitter and the identities it announces.

    A legitimate robot announces exactly one identity at unit power scale.
    A Sybil attacker announces two or more, each optionally with its own
    transmit power coefficient alpha > 0.
    """

    true_source_id: str
    claimed_identities: tuple
    trajectory: Trajectory
    base_tx_power_w: float
    power_scale_per_identity: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = tuple(str(i) for i in self.claimed_identities)
        if not ids:
            raise IdentityError(f"agent {self.true_source_id!r} claims no identities")
        if len(set(ids)) != len(ids):
            raise IdentityError(f"agent {self.true_source_id!r} repeats an identity")
        object.__setattr__(self, "claimed_identities", ids)
        _positive("base_tx_power_w", self.base_tx_power_w)
        scale = {str(k): float(v) for k, v in self.power_scale_per_identity.items()}
        unknown = set(scale) - set(ids)
        if unknown:
            raise IdentityError(
                f"power scale given for identities {sorted(unknown)} not claimed "
                f"by agent {self.true_source_id!r}")
        for ident, alpha in scale.items():
            if not (alpha > 0) or not math.isfinite(alpha):
                raise IdentityError(f"alpha for {ident!r} must be > 0, got {alpha}")
        if len(ids) == 1 and scale.get(ids[0], 1.0) != 1.0:
            raise IdentityError(
                f"legitimate agent {self.true_source_id!r} must transmit at alpha = 1")
        object.__setattr__(self, "power_scale_per_identity", scale)

    @property
    def is_attacker(self) -> bool:
        return len(self.claimed_identities) > 1

    def alpha_for(self, identity: str) -> float:
        return self.power_scale_per_identity.get(identity, 1.0)


@dataclass(frozen=True)
class ReceivedTrace:
    """Magnitude samples received for one identity announcement.

    ``tag_schedule`` annotates each sample with the tag block it belongs to
    (1..K over the backscattered region, 0 over the ambient-only guards);
    ``tag_code`` is the known M-bit modulation pattern shared by all tags.
    """

    identity: str
    true_source_id: str
    t_s: float
    sample_rate_hz: float
    samples: np.ndarray
    tag_schedule: np.ndarray
    tag_code: np.ndarray
    samples_per_bit: int
    n_tags: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        schedule = np.asarray(self.tag_schedule, dtype=np.int16)
        code = np.asarray(self.tag_code, dtype=np.uint8)
        _positive("sample_rate_hz", self.sample_rate_hz)
        if code.ndim != 1 or code.size == 0:
            raise ParameterError("tag_code must be a nonempty 1-D binary array")
        if np.any((code != 0) & (code != 1)):
            raise ParameterError("tag_code entries must be 0 or 1")
        if self.samples_per_bit < 1:
            raise ParameterError(f"samples_per_bit must be >= 1, got {self.samples_per_bit}")
        if self.n_tags < 1:
            raise ParameterError(f"n_tags must be >= 1, got {self.n_tags}")
        if samples.ndim != 1 or schedule.shape != samples.shape:
            raise ShapeError(
                f"samples {samples.shape} and tag_schedule {schedule.shape} "
                "must be 1-D arrays of equal length")
        if samples.size < code.size * self.samples_per_bit:
            raise ParameterError("trace shorter than one full code span")
        if np.any(samples < 0):
            raise ParameterError("trace magnitudes must be nonnegative")
        if schedule.min() < 0 or schedule.max() > self.n_tags:
            raise ParameterError("tag_schedule values must lie in 0..n_tags")
        _readonly(self, "samples", samples)
        _readonly(self, "tag_schedule", schedule)
        _readonly(self, "tag_code", code)

    @property
    def code_span(self) -> int:
        """Length of the backscattered region in samples."""
        return int(self.tag_code.size) * int(self.samples_per_bit)

    def scheduled_start(self):
        """Ground-truth start index of the backscattered region, or None."""
        nz = np.nonzero(self.tag_schedule)[0]
        return int(nz[0]) if nz.size else None


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to synthesize one scenario deterministically."""

    channel: ChannelParams
    tag_layout: TagLayout
    receiver_trajectory: Trajectory
    agents: tuple
    horizon_s: float = 60.0
    period_s: float = DEFAULT_PERIOD_S
    code_bits: int = DEFAULT_CODE_BITS
    samples_per_bit: int = DEFAULT_SAMPLES_PER_BIT
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ
    ambient_w: float = DEFAULT_AMBIENT_W
    snr_db: float | None = DEFAULT_SNR_DB
    slot_spacing_s: float = DEFAULT_SLOT_SPACING_S

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        _positive("horizon_s", self.horizon_s)
        _positive("period_s", self.period_s)
        _positive("sample_rate_hz", self.sample_rate_hz)
        _positive("ambient_w", self.ambient_w)
        if self.slot_spacing_s < 0:
            raise ParameterError("slot_spacing_s must be >= 0")
        if self.code_bits < 2:
            raise ParameterError(f"code_bits must be >= 2, got {self.code_bits}")
        if self.samples_per_bit < 1:
            raise ParameterError(f"samples_per_bit must be >= 1, got {self.samples_per_bit}")
        seen = set()
        for agent in self.agents:
            for ident in agent.claimed_identities:
                if ident in seen:
                    raise IdentityError(f"identity {ident!r} claimed by more than one agent")
                seen.add(ident)

    @property
    def identities(self) -> tuple:
        """All claimed identities, in agent declaration order."""
        out = []
        for agent in self.agents:
            out.extend(agent.claimed_identities)
        return tuple(out)

    @property
    def n_periods(self) -> int:
        # guard against 9.999... from float division
        return int(self.horizon_s / self.period_s + 1e-9)

    def agent_of(self, identity: str) -> RobotAgent:
        for agent in self.agents:
            if identity in agent.claimed_identities:
                return agent
        raise IdentityError(f"unknown identity {identity!r}")

    def true_sources(self) -> dict:
        return {i: self.agent_of(i).true_source_id for i in self.identities}


@dataclass(frozen=True)
class ScenarioRun:
    """Output of simulate_scenario: per-identity trace streams plus truth."""

    traces: dict
    true_sources: dict
    seed: int

    @property
    def identities(self) -> tuple:
        return tuple(self.traces.keys())


def alternating_code(n_bits: int) -> np.ndarray:
    """The shared modulation pattern: 1, 0, 1, 0, ... over n_bits."""
    if n_bits < 2:
        raise ParameterError(f"code needs >= 2 bits, got {n_bits}")
    return (1 - np.arange(n_bits, dtype=np.uint8) % 2).astype(np.uint8)


def tag_block_bit_spans(n_bits: int, n_tags: int):
    """Carve the M code bits into K contiguous near-equal per-tag spans.

    Returns a list of (first_bit, last_bit_exclusive) pairs.  Longer spans
    come first when n_bits is not divisible by n_tags, matching
    numpy.array_split.
    """
    if n_tags < 1:
        raise ParameterError(f"n_tags must be >= 1, got {n_tags}")
    if n_bits < 2 * n_tags:
        raise ParameterError(
            f"{n_bits} code bits cannot give every one of {n_tags} tags both "
            "a reflecting and a non-reflecting bit")
    edges = [len(part) for part in np.array_split(np.arange(n_bits), n_tags)]
    bounds = np.concatenate([[0], np.cumsum(edges)])
    return [(int(bounds[i]), int(bounds[i + 1])) for i in range(n_tags)]


def reflected_power(channel: ChannelParams, tx_power_w: float,
                    d_t_m: float, d_r_m: float) -> float:
    """Tag-reflected signal strength at the receiver.

    Two cascaded free-space segments (transmitter -> tag, tag -> receiver)
    with the tag's scattering lumped into channel.tag_transfer.  Strictly
    decreasing in both distances, linear in transmit power.
    """
    tx_power_w = _positive("tx_power_w", tx_power_w)
    d_t_m = _positive("d_t_m", d_t_m)
    d_r_m = _positive("d_r_m", d_r_m)
    incident = tx_power_w * channel.tx_gain / (4.0 * math.pi * d_t_m ** 2)
    collected = channel.wavelength_m ** 2 * channel.rx_gain / (16.0 * math.pi ** 2 * d_r_m ** 2)
    return incident * collected * channel.tag_transfer


def position_at(trajectory: Trajectory, t_s: float) -> np.ndarray:
    """Piecewise-linear interpolation of the trajectory at time t_s."""
    wp = trajectory.waypoints
    if not (wp[0, 0] <= t_s <= wp[-1, 0]):
        raise TrajectoryRangeError(
            f"t = {t_s} outside trajectory span [{wp[0, 0]}, {wp[-1, 0]}]")
    return np.array([np.interp(t_s, wp[:, 0], wp[:, 1]),
                     np.interp(t_s, wp[:, 0], wp[:, 2])])


def tag_reflection_powers(scenario: ScenarioConfig, agent: RobotAgent,
                          identity: str, t_s: float) -> np.ndarray:
    """Ground-truth per-tag reflected powers for one announcement.

    The receiver pose is sampled at t_s and held for the whole trace
    (quasi-static); tag positions are body-frame offsets from it.
    """
    if identity not in agent.claimed_identities:
        raise IdentityError(
            f"identity {identity!r} does not belong to agent {agent.true_source_id!r}")
    tx_power = agent.base_tx_power_w * agent.alpha_for(identity)
    tx_pos = position_at(agent.trajectory, t_s)
    rx_pos = position_at(scenario.receiver_trajectory, t_s)
    tag_world = rx_pos[None, :] + scenario.tag_layout.tag_positions
    d_t = np.hypot(*(tx_pos[None, :] - tag_world).T)
    d_r = scenario.tag_layout.tag_ranges_m
    return np.array([
        reflected_power(scenario.channel, tx_power, float(dt), float(dr))
        for dt, dr in zip(d_t, d_r)
    ])


def synthesize_trace(scenario: ScenarioConfig, agent: RobotAgent, identity: str,
                     t_s: float, rng_seed: int) -> ReceivedTrace:
    """Synthesize the received trace for one identity announcement.

    Layout: an ambient-only guard prefix of random length (one to three code
    spans), the backscattered region (all tags keyed on/off by the shared
    code, one contiguous block per tag), and an ambient-only suffix filling
    the trace to five code spans.  Additive white Gaussian noise is scaled
    to scenario.snr_db relative to the strongest tag reflection of this
    trace; snr_db = None disables it.
    """
    powers = tag_reflection_powers(scenario, agent, identity, t_s)
    code = alternating_code(scenario.code_bits)
    spans = tag_block_bit_spans(scenario.code_bits, scenario.tag_layout.n_tags)
    spb = scenario.samples_per_bit
    code_span = scenario.code_bits * spb
    total = TRACE_SPANS * code_span

    rng = np.random.default_rng(rng_seed)
    # prefix drawn before noise so the layout is reproducible on its own
    prefix = int(rng.integers(MIN_GUARD_SPANS * code_span,
                              (TRACE_SPANS - 2 * MIN_GUARD_SPANS) * code_span + 1))
    t0 = prefix

    samples = np.full(total, scenario.ambient_w, dtype=np.float64)
    schedule = np.zeros(total, dtype=np.int16)
    for tag_idx, (b0, b1) in enumerate(spans):
        lo, hi = t0 + b0 * spb, t0 + b1 * spb
        schedule[lo:hi] = tag_idx + 1
        block_bits = code[b0:b1]
        on = np.repeat(block_bits, spb).astype(np.float64)
        samples[lo:hi] += powers[tag_idx] * on

    if scenario.snr_db is not None:
        sigma = float(powers.max()) * 10.0 ** (-scenario.snr_db / 20.0)
        if sigma > 0:
            samples = samples + rng.normal(0.0, sigma, total)
    np.maximum(samples, 0.0, out=samples)

    return ReceivedTrace(
        identity=identity,
        true_source_id=agent.true_source_id,
        t_s=t_s,
        sample_rate_hz=scenario.sample_rate_hz,
        samples=samples,
        tag_schedule=schedule,
        tag_code=code,
        samples_per_bit=spb,
        n_tags=scenario.tag_layout.n_tags,
    )


def scenario_to_dict(scenario: ScenarioConfig) -> dict:
    """Plain-data view of a scenario config, canonical for hashing."""
    return {
        "channel": {
            "wavelength_m": scenario.channel.wavelength_m,
            "tx_gain": scenario.channel.tx_gain,
            "rx_gain": scenario.channel.rx_gain,
            "tag_gain": scenario.channel.tag_gain,
            "reflection_coeff": scenario.channel.reflection_coeff,
            "tag_transfer": scenario.channel.tag_transfer,
        },
        "tags": {
            "ring_radius_m": scenario.tag_layout.ring_radius_m,
            "positions": scenario.tag_layout.tag_positions.tolist(),
        },
        "receiver": {
            "speed_mps": scenario.receiver_trajectory.speed_mps,
            "waypoints": scenario.receiver_trajectory.waypoints.tolist(),
        },
        "agents": [
            {
                "true_source_id": a.true_source_id,
                "claimed_identities": list(a.claimed_identities),
                "base_tx_power_w": a.base_tx_power_w,
                "power_scale_per_identity": dict(sorted(a.power_scale_per_identity.items())),
                "speed_mps": a.trajectory.speed_mps,
                "waypoints": a.trajectory.waypoints.tolist(),
            }
            for a in scenario.agents
        ],
        "horizon_s": scenario.horizon_s,
        "period_s": scenario.period_s,
        "code_bits": scenario.code_bits,
        "samples_per_bit": scenario.samples_per_bit,
        "sample_rate_hz": scenario.sample_rate_hz,
        "ambient_w": scenario.ambient_w,
        "snr_db": scenario.snr_db,
        "slot_spacing_s": scenario.slot_spacing_s,
    }


def trace_seeds(master_seed: int, n_identities: int, n_periods: int) -> np.ndarray:
    """Independent per-trace integer seeds derived from one master seed."""
    ss = np.random.SeedSequence(master_seed)
    n = max(n_identities * n_periods, 1)
    return ss.generate_state(n, dtype=np.uint64)


def simulate_scenario(scenario: ScenarioConfig, rng_seed: int) -> ScenarioRun:
    """Run one scenario: one trace per claimed identity per update period.

    Identities transmit in fixed slots within each period (slot_spacing_s
    apart, declaration order) so that announcements are distinct events in
    time.  Bit-identical output for identical (scenario, rng_seed).
    """
    identities = scenario.identities
    n_periods = scenario.n_periods
    if identities:
        if (len(identities) - 1) * scenario.slot_spacing_s >= scenario.period_s:
            raise ConfigError(
                f"{len(identities)} identity slots at {scenario.slot_spacing_s} s "
                f"spacing do not fit inside one {scenario.period_s} s period")
        trajs = [scenario.receiver_trajectory] + [a.trajectory for a in scenario.agents]
        for traj in trajs:
            if traj.t_min > 0.0 or traj.t_max < scenario.horizon_s:
                raise ConfigError(
                    f"trajectory spans [{traj.t_min}, {traj.t_max}] but must cover "
                    f"the scenario horizon [0, {scenario.horizon_s}]")

    seeds = trace_seeds(rng_seed, len(identities), n_periods)
    traces = {ident: [] for ident in identities}
    for id_idx, ident in enumerate(identities):
        agent = scenario.agent_of(ident)
        for k in range(n_periods):
            t_s = k * scenario.period_s + id_idx * scenario.slot_spacing_s
            seed = int(seeds[id_idx * n_periods + k])
            traces[ident].append(synthesize_trace(scenario, agent, ident, t_s, seed))
    return ScenarioRun(
        traces={ident: tuple(ts) for ident, ts in traces.items()},
        true_sources=scenario.true_sources(),
        seed=int(rng_seed),
    )
