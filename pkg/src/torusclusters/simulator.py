"""N-particle kinetic Langevin engine on the periodic torus.

The dynamics is

    dx_i = v_i dt
    dv_i = -(1/N) sum_j grad W(x_i - x_j) dt - gamma v_i dt
           + sqrt(2 gamma / beta) dB_i,

integrated by composing exact sub-flows of the split vector field:

    A: (x, v) -> (x + h v, v)                       free drift
    B: (x, v) -> (x, v - h grad U(x))               force kick
    O: (x, v) -> (x, eta v + sqrt((1-eta^2)/beta) xi),  eta = exp(-h gamma)
    U: exact Ornstein-Uhlenbeck update of (x, v) jointly, two correlated
       Gaussians per half step (the strong-order-two building block)

Doubled letters in an integrator name take half steps: BAOAB is
B(h/2) A(h/2) O(h) A(h/2) B(h/2).  BAOAB, OBABO and ABO reuse the trailing
force evaluation for the next step's leading kick, so all integrators cost
one O(N^2) force pass per step.

Forces use the minimum-image convention with no cutoff: the potentials in
use are negligible beyond half the box, and at N <= a few thousand a dense
pair pass beats maintaining cell or neighbour lists.

Reproducibility: one counter-based Philox stream per trajectory; every
normal draw is consumed in a fixed (particle, component) order, so a given
(config, seed) pair yields a bit-identical trajectory.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import potentials as pot
from .observables import d_com, kinetic_temperature, msd
from .periodic import minimum_image, wrap_positions

__all__ = [
    "SimConfig",
    "ParticleState",
    "RngStream",
    "TrajectoryRecord",
    "BlowUpError",
    "init_state",
    "compute_forces",
    "drift_map",
    "kick_map",
    "ou_map",
    "u_map",
    "step_baoab",
    "step_obabo",
    "step_abo",
    "step_ubu",
    "run",
    "write_observables_csv",
    "read_observables_csv",
    "write_frames",
    "read_frames",
]

INTEGRATORS = ("baoab", "obabo", "abo", "ubu")

OBSERVABLE_COLUMNS = ("time", "d_com", "msd", "t_kin", "u_pot")

# below this, the U-map noise coefficients switch to series evaluation
_UBU_SERIES_THRESHOLD = 1.0e-4


class BlowUpError(RuntimeError):
    """Non-finite state detected; the integration step size is too large."""

    def __init__(self, step):
        super().__init__(f"non-finite particle state after step {step}")
        self.step = step


class RngStream:
    """Counter-based random stream (Philox) with a recorded seed."""

    def __init__(self, seed):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.Philox(self.seed))

    def normals(self, shape):
        return self._gen.standard_normal(shape)

    def uniform(self, shape, high=1.0):
        return self._gen.random(shape) * high


@dataclass
class SimConfig:
    n_particles: int
    potential: object = None
    dims: int = 1
    box: float = 10.0
    beta: float = 25.0
    gamma: float = 1.0
    h: float = 0.01
    n_steps: int = 1000
    print_every: int = 100
    integrator: str = "baoab"
    seed: int = 0
    dump_trajectory: bool = False
    auto_scale_h: bool = False

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if self.dims not in (1, 2, 3):
            raise ValueError("dims must be 1, 2 or 3")
        if self.box <= 0 or self.beta <= 0 or self.h <= 0:
            raise ValueError("box, beta and h must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.n_steps < 0 or self.print_every < 1:
            raise ValueError("n_steps must be >= 0 and print_every >= 1")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        if isinstance(self.potential, pot.WrappedGaussian):
            raise ValueError(
                "wrapped potentials are incompatible with the minimum-image force kernel"
            )
        if self.auto_scale_h and self.gamma == 0.0:
            raise ValueError("auto_scale_h needs gamma > 0")
        if self.potential is not None and not pot.force_negligible_at_half_box(
            self.potential, self.box
        ):
            warnings.warn(
                "interaction gradient is not negligible at box/2; "
                "minimum-image truncation will distort forces",
                stacklevel=2,
            )

    @property
    def effective_h(self):
        """Stepsize after the h ~ min(gamma, 1/gamma) accuracy scaling."""
        if self.auto_scale_h:
            return self.h * min(self.gamma, 1.0 / self.gamma)
        return self.h


@dataclass
class ParticleState:
    """Mutable simulation state; positions always wrapped into [0, box)."""

    positions: np.ndarray
    velocities: np.ndarray
    box: float
    time: float = 0.0
    initial_positions: np.ndarray = None
    unwrapped_displacement: np.ndarray = None

    def __post_init__(self):
        if self.initial_positions is None:
            self.initial_positions = self.positions.copy()
        if self.unwrapped_displacement is None:
            self.unwrapped_displacement = np.zeros_like(self.positions)

    @property
    def n_particles(self):
        return self.positions.shape[0]

    @property
    def dims(self):
        return self.positions.shape[1]

    def is_finite(self):
        return bool(
            np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.velocities))
        )


def init_state(cfg, rng=None):
    """Uniform positions on [0, box)^d, Maxwellian velocities at 1/beta."""
    rng = rng if rng is not None else RngStream(cfg.seed)
    positions = rng.uniform((cfg.n_particles, cfg.dims), high=cfg.box)
    velocities = rng.normals((cfg.n_particles, cfg.dims)) / math.sqrt(cfg.beta)
    return ParticleState(positions=positions, velocities=velocities, box=cfg.box)


# Reusable O(N^2) buffers for the force kernel, keyed by (n, d).  One
# trajectory runs per process (ensembles parallelize across processes), so
# there is no concurrent access to a given workspace.
_FORCE_WS = {}


def _force_workspace(n, d):
    key = (n, d)
    ws = _FORCE_WS.get(key)
    if ws is None:
        ws = {
            "deltas": [np.empty((n, n)) for _ in range(d)],
            "r2": np.empty((n, n)),
            "tmp": np.empty((n, n)),
            "w": np.empty((n, n)),
            "gf": np.empty((n, n)),
            "rowsum": np.empty(n),
        }
        _FORCE_WS[key] = ws
    return ws


def compute_forces(positions, box, spec):
    """Minimum-image pair forces and potential energy.

    Returns (forces, u_pot) with forces[i] = -(1/N) sum_{j != i}
    grad W(dx_ij) and u_pot = (1/N) sum_{i > j} W(|dx_ij|).  Dense O(N^2)
    pass over preallocated buffers; the summation order is fixed, so
    results are deterministic.
    """
    positions = np.asarray(positions, dtype=float)
    n, d = positions.shape
    if spec is None or n == 1:
        return np.zeros_like(positions), 0.0
    ws = _force_workspace(n, d)
    r2, tmp = ws["r2"], ws["tmp"]
    for dim in range(d):
        delta = ws["deltas"][dim]
        col = positions[:, dim]
        np.subtract(col[:, None], col[None, :], out=delta)
        # wrap into [-box/2, box/2]: positions are wrapped, so |delta| < box
        # and trunc(2 delta / box) is the image shift in {-1, 0, 1}
        np.multiply(delta, 2.0 / box, out=tmp)
        np.trunc(tmp, out=tmp)
        tmp *= box
        delta -= tmp
        np.multiply(delta, delta, out=tmp)
        if dim == 0:
            r2[:] = tmp
        else:
            r2 += tmp

    w, gf = ws["w"], ws["gf"]
    if isinstance(spec, pot.Gaussian):
        # fused path: the Gaussian needs only r^2
        np.multiply(r2, -0.5 / spec.sigma2, out=w)
        np.exp(w, out=w)
        np.multiply(w, 1.0 / spec.sigma2, out=gf)
        np.negative(w, out=w)
    else:
        np.sqrt(r2, out=tmp)
        w[:], gf[:] = spec.pair_terms(tmp)

    # diagonal terms: delta = 0 kills the force contribution (gf(0) is
    # finite for every supported potential); the energy subtracts n W(0)
    forces = np.empty_like(positions)
    rowsum = ws["rowsum"]
    for dim in range(d):
        np.multiply(gf, ws["deltas"][dim], out=tmp)
        np.sum(tmp, axis=1, out=rowsum)
        np.multiply(rowsum, -1.0 / n, out=forces[:, dim])
    w_zero = float(np.asarray(spec.value(0.0)))
    u_pot = 0.5 * (float(w.sum()) - n * w_zero) / n
    return forces, u_pot


# ---------------------------------------------------------------------------
# exact sub-flow maps
# ---------------------------------------------------------------------------


def drift_map(state, duration):
    """A: advance positions along velocities, wrap, track true displacement."""
    delta = duration * state.velocities
    state.unwrapped_displacement += delta
    state.positions = wrap_positions(state.positions + delta, state.box)
    return state


def kick_map(state, duration, forces):
    """B: velocity kick from precomputed forces."""
    state.velocities = state.velocities + duration * forces
    return state


def ou_map(state, duration, gamma, beta, rng):
    """O: exact Ornstein-Uhlenbeck velocity update.

    Degenerates to the identity for duration -> 0 or gamma -> 0 and to a
    fresh Maxwellian draw for duration -> infinity.  Noise is drawn even
    when its coefficient vanishes, keeping the stream aligned across
    parameter values.
    """
    eta = math.exp(-gamma * duration)
    noise = rng.normals(state.velocities.shape)
    state.velocities = eta * state.velocities + math.sqrt((1.0 - eta * eta) / beta) * noise
    return state


def _u_coefficients(gamma, duration, beta):
    """Noise/drift coefficients of the exact joint (x, v) OU update.

    Returns (eta, cxv, cx1, cx2, cv1, cv2) such that

        x' = x + cxv v + cx1 xi1 + cx2 xi2
        v' = eta v + cv1 xi1 + cv2 xi2

    reproduces the exact distribution of the free (no-force) Langevin flow
    over `duration`.  For gamma * duration below 1e-4 the 1 - tanh(x)/x
    cancellation is evaluated by series.
    """
    if gamma == 0.0:
        return 1.0, duration, 0.0, 0.0, 0.0, 0.0
    x = gamma * duration
    eta = math.exp(-x)
    one_minus_eta = -math.expm1(-x)
    cxv = one_minus_eta / gamma
    half = 0.5 * x
    if x < _UBU_SERIES_THRESHOLD:
        h2 = half * half
        one_minus_r = h2 / 3.0 - 2.0 * h2 * h2 / 15.0 + 17.0 * h2 ** 3 / 315.0
        gap = x * x / 2.0 - x ** 3 / 6.0 + x ** 4 / 24.0  # x - (1 - eta)
    else:
        one_minus_r = 1.0 - math.tanh(half) / half
        gap = x + math.expm1(-x)
    sqrt_dur = math.sqrt(duration)
    s = math.sqrt(-math.expm1(-2.0 * x) / (2.0 * gamma))
    cv1 = math.sqrt(2.0 * gamma / beta) * one_minus_eta / (gamma * sqrt_dur)
    cv2 = math.sqrt(2.0 * gamma / beta) * s * math.sqrt(one_minus_r)
    cx1 = math.sqrt(2.0 / (gamma * beta)) * gap / (gamma * sqrt_dur)
    cx2 = -cv2 / gamma
    return eta, cxv, cx1, cx2, cv1, cv2


def u_map(state, duration, gamma, beta, rng):
    """U: exact joint position-velocity OU flow with correlated noises.

    Consumes two fresh standard-normal fields per call; reduces to the
    plain drift A for gamma = 0.
    """
    eta, cxv, cx1, cx2, cv1, cv2 = _u_coefficients(gamma, duration, beta)
    xi1 = rng.normals(state.velocities.shape)
    xi2 = rng.normals(state.velocities.shape)
    delta = cxv * state.velocities + cx1 * xi1 + cx2 * xi2
    state.unwrapped_displacement += delta
    state.positions = wrap_positions(state.positions + delta, state.box)
    state.velocities = eta * state.velocities + cv1 * xi1 + cv2 * xi2
    return state


# ---------------------------------------------------------------------------
# integrator steps
# ---------------------------------------------------------------------------
# Each step function advances one full step h and returns
# (forces_at_final_positions or None, u_pot_at_final_positions or None);
# a non-None force is valid as the cached input of the next step.


def step_baoab(state, h, cfg, rng, forces=None):
    if forces is None:
        forces, _ = compute_forces(state.positions, state.box, cfg.potential)
    kick_map(state, 0.5 * h, forces)
    drift_map(state, 0.5 * h)
    ou_map(state, h, cfg.gamma, cfg.beta, rng)
    drift_map(state, 0.5 * h)
    forces, u_pot = compute_forces(state.positions, state.box, cfg.potential)
    kick_map(state, 0.5 * h, forces)
    state.time += h
    return forces, u_pot


def step_obabo(state, h, cfg, rng, forces=None):
    ou_map(state, 0.5 * h, cfg.gamma, cfg.beta, rng)
    if forces is None:
        forces, _ = compute_forces(state.positions, state.box, cfg.potential)
    kick_map(state, 0.5 * h, forces)
    drift_map(state, h)
    forces, u_pot = compute_forces(state.positions, state.box, cfg.potential)
    kick_map(state, 0.5 * h, forces)
    ou_map(state, 0.5 * h, cfg.gamma, cfg.beta, rng)
    state.time += h
    return forces, u_pot


def step_abo(state, h, cfg, rng, forces=None):
    drift_map(state, h)
    forces, u_pot = compute_forces(state.positions, state.box, cfg.potential)
    kick_map(state, h, forces)
    ou_map(state, h, cfg.gamma, cfg.beta, rng)
    state.time += h
    return forces, u_pot


def step_ubu(state, h, cfg, rng, forces=None):
    u_map(state, 0.5 * h, cfg.gamma, cfg.beta, rng)
    forces, _ = compute_forces(state.positions, state.box, cfg.potential)
    kick_map(state, h, forces)
    u_map(state, 0.5 * h, cfg.gamma, cfg.beta, rng)
    state.time += h
    # positions moved after the kick: cached forces and energy are stale
    return None, None


_STEPPERS = {
    "baoab": step_baoab,
    "obabo": step_obabo,
    "abo": step_abo,
    "ubu": step_ubu,
}


# ---------------------------------------------------------------------------
# trajectory driver
# ---------------------------------------------------------------------------


@dataclass
class TrajectoryRecord:
    """Observable time series plus optional per-frame position dumps."""

    times: np.ndarray
    d_com: np.ndarray
    msd: np.ndarray
    t_kin: np.ndarray
    u_pot: np.ndarray
    seed: int
    frames: list = field(default_factory=list)

    def series(self, name):
        return self.times, getattr(self, name)


def _sample(state, u_pot, cfg):
    n = state.n_particles
    if u_pot < -0.5 * (n - 1) - 1e-9:
        raise RuntimeError(
            f"potential energy {u_pot} below the coincident-state bound {-0.5 * (n - 1)}"
        )
    return (
        state.time,
        d_com(state.positions, state.box),
        msd(state.positions, state.initial_positions, state.box),
        kinetic_temperature(state.velocities),
        u_pot,
    )


def run(cfg, initial_state=None):
    """Integrate a trajectory and sample observables every print_every steps.

    The initial configuration is sampled from the seed unless an explicit
    ``initial_state`` is supplied.  Raises BlowUpError with the offending
    step index when the state stops being finite.
    """
    rng = RngStream(cfg.seed)
    state = initial_state if initial_state is not None else init_state(cfg, rng)
    h = cfg.effective_h
    step_fn = _STEPPERS[cfg.integrator]

    forces, u_pot = compute_forces(state.positions, state.box, cfg.potential)
    rows = [_sample(state, u_pot, cfg)]
    frames = []
    if cfg.dump_trajectory:
        frames.append((state.time, state.positions.copy()))

    for step in range(1, cfg.n_steps + 1):
        forces, u_pot = step_fn(state, h, cfg, rng, forces)
        if not state.is_finite():
            raise BlowUpError(step)
        if step % cfg.print_every == 0:
            if u_pot is None:
                _, u_pot = compute_forces(state.positions, state.box, cfg.potential)
            rows.append(_sample(state, u_pot, cfg))
            if cfg.dump_trajectory:
                frames.append((state.time, state.positions.copy()))

    data = np.asarray(rows, dtype=float)
    return TrajectoryRecord(
        times=data[:, 0],
        d_com=data[:, 1],
        msd=data[:, 2],
        t_kin=data[:, 3],
        u_pot=data[:, 4],
        seed=cfg.seed,
        frames=frames,
    )


# ---------------------------------------------------------------------------
# on-disk formats
# ---------------------------------------------------------------------------
# Observable CSV: header "time,d_com,msd,t_kin,u_pot", one row per sample,
# fields rendered with %.12g, "\n" line endings.
# Frame dump: per frame a header line "# t=<time:%.12g>" followed by one
# line per particle of d space-separated %.12g coordinates.


def _fmt(x):
    return f"{x:.12g}"


def write_observables_csv(record, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(OBSERVABLE_COLUMNS) + "\n")
        for i in range(len(record.times)):
            fh.write(
                ",".join(
                    _fmt(v)
                    for v in (
                        record.times[i],
                        record.d_com[i],
                        record.msd[i],
                        record.t_kin[i],
                        record.u_pot[i],
                    )
                )
                + "\n"
            )


def read_observables_csv(path):
    """Observable series as a dict of column -> array."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != list(OBSERVABLE_COLUMNS):
            raise ValueError(f"{path}: unexpected observable header {header}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        data = data.reshape(0, len(OBSERVABLE_COLUMNS))
    return {name: data[:, i] for i, name in enumerate(OBSERVABLE_COLUMNS)}


def write_frames(frames, path):
    with open(path, "w", newline="\n") as fh:
        for time, positions in frames:
            fh.write(f"# t={_fmt(time)}\n")
            for row in np.atleast_2d(positions):
                fh.write(" ".join(_fmt(c) for c in row) + "\n")


def read_frames(path):
    """List of (time, positions) parsed from a frame dump."""
    frames = []
    time = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if time is not None:
                    frames.append((time, np.asarray(rows, dtype=float)))
                if "t=" not in line:
                    raise ValueError(f"{path}: malformed frame header {line!r}")
                time = float(line.split("t=")[1])
                rows = []
            else:
                rows.append([float(tok) for tok in line.split()])
    if time is not None:
        frames.append((time, np.asarray(rows, dtype=float)))
    return frames
