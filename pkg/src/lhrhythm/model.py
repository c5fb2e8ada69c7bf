"""Synthetic plasma LH generator.

Spike-train secretion with a photoperiod-controlled interspike interval,
first-order clearance into plasma, and jittered twice-weekly sampling.
All times are in hours.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .mt64 import MT19937_64

HOURS_PER_YEAR = 8760.0


class ProfileKind(str, enum.Enum):
    CONSTANT = "constant"
    SINUSOID = "sinusoid"
    DAMPED = "damped"


@dataclass(frozen=True)
class PspikeProfile:
    """Interspike-interval control law P_spike(t), in hours."""

    kind: ProfileKind
    p_const: float = 36.0
    p_min: float = 1.5
    p_max: float = 36.0
    p_photo: float = HOURS_PER_YEAR
    zeta: float = 0.14

    def __post_init__(self):
        object.__setattr__(self, "kind", ProfileKind(self.kind))
        if self.kind is ProfileKind.CONSTANT:
            if not self.p_const > 0:
                raise ValueError(f"p_const must be positive, got {self.p_const}")
            return
        if not 0 < self.p_min <= self.p_max:
            raise ValueError(f"need 0 < p_min <= p_max, got {self.p_min}, {self.p_max}")
        if not self.p_photo > 0:
            raise ValueError(f"p_photo must be positive, got {self.p_photo}")
        if not 0 <= self.zeta < 1:
            raise ValueError(f"zeta must lie in [0, 1), got {self.zeta}")

    @classmethod
    def constant(cls, p):
        return cls(ProfileKind.CONSTANT, p_const=p)

    @classmethod
    def sinusoid(cls, p_min=1.5, p_max=36.0, p_photo=HOURS_PER_YEAR):
        return cls(ProfileKind.SINUSOID, p_min=p_min, p_max=p_max, p_photo=p_photo)

    @classmethod
    def damped(cls, p_min=1.5, p_max=36.0, p_photo=HOURS_PER_YEAR, zeta=0.14):
        return cls(ProfileKind.DAMPED, p_min=p_min, p_max=p_max, p_photo=p_photo,
                   zeta=zeta)

    @property
    def delta_p(self):
        return self.p_max - self.p_min

    @property
    def omega(self):
        return 2.0 * math.pi / self.p_photo

    @property
    def k_continuity(self):
        # makes the damped branch meet the sinusoid at t = p_photo
        return 1.0 / (math.sin(2.0 * math.sqrt(1.0 - self.zeta ** 2) * math.pi) + 1.0)

    def kernel_args(self):
        """Flat parameter tuple consumed by the compiled/numpy kernels."""
        code = {ProfileKind.CONSTANT: 0, ProfileKind.SINUSOID: 1, ProfileKind.DAMPED: 2}
        return (code[self.kind], float(self.p_const), float(self.p_min),
                float(self.delta_p), float(self.p_photo), float(self.zeta),
                float(self.k_continuity))


@dataclass(frozen=True)
class SecretionParams:
    a_spike: float = 150.0     # ng
    k_hl: float = 2.0          # 1/h
    alpha_clear: float = 6.0   # 1/h

    def __post_init__(self):
        for name in ("a_spike", "k_hl", "alpha_clear"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def half_life(self):
        return math.log(2.0) / self.k_hl


@dataclass(frozen=True)
class SamplingSchedule:
    base_interval: float = 84.0
    jitter_halfwidth: float = 0.5
    seed: int = 5489
    start_offset: float = 0.0

    def __post_init__(self):
        if not self.base_interval > 2 * self.jitter_halfwidth:
            raise ValueError("base_interval must exceed twice the jitter half-width")
        if self.jitter_halfwidth < 0:
            raise ValueError("jitter_halfwidth must be non-negative")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def jitter(self, n):
        """The first ``n`` jitter offsets a(i), uniform on [-w, w]."""
        rng = MT19937_64(int(self.seed))
        w = self.jitter_halfwidth
        return np.array([(2.0 * rng.real1() - 1.0) * w for _ in range(n)])

    def times(self, n):
        i = np.arange(n, dtype=float)
        return self.start_offset + self.base_interval * i + self.jitter(n)


@dataclass(frozen=True, eq=False)
class UniformSeries:
    t0: float
    dt: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        object.__setattr__(self, "values", values)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if values.ndim != 1 or len(values) < 1:
            raise ValueError("values must be a non-empty 1-D array")

    def __len__(self):
        return len(self.values)

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(len(self.values))

    @property
    def t_end(self):
        return self.t0 + self.dt * (len(self.values) - 1)

    def with_values(self, values):
        return UniformSeries(self.t0, self.dt, values)


@dataclass(frozen=True, eq=False)
class IrregularSeries:
    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    below_floor: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ValueError("times and values must be finite")

    def __len__(self):
        return len(self.times)


def eval_pspike(profile, t):
    """Interspike interval P_spike(t) in hours; ``t`` may be an array."""
    t = np.asarray(t, dtype=float)
    if profile.kind is ProfileKind.CONSTANT:
        out = np.full_like(t, profile.p_const)
        return out if out.ndim else float(out)
    half = 0.5 * profile.delta_p
    w = profile.omega
    out = half * (np.sin(w * t) + 1.0) + profile.p_min
    if profile.kind is ProfileKind.DAMPED:
        z = profile.zeta
        damped = (half * (np.sin(math.sqrt(1.0 - z * z) * w * t) + 1.0)
                  * profile.k_continuity * np.exp(-z * w * (t - profile.p_photo))
                  + profile.p_min)
        out = np.where(t < profile.p_photo, out, damped)
    return out if out.ndim else float(out)


def eval_secretion(params, profile, t):
    """Pituitary release LH(t): a decaying spike restarted every P_spike(t) hours."""
    t = np.asarray(t, dtype=float)
    p = eval_pspike(profile, t)
    since_spike = t - np.floor(t / p) * p
    out = params.a_spike * np.exp(-params.k_hl * since_spike)
    return out if out.ndim else float(out)


def integrate_plasma(params, profile, horizon, fine_dt=0.01, *, initial=0.0,
                     forcing=None, backend=None):
    """Integrate dLH_p/dt = LH(t) - alpha*LH_p on the grid {0, fine_dt, ...}.

    Each step uses the exponential midpoint rule
    ``y[n+1] = exp(-a h) y[n] + (1 - exp(-a h))/a * f(t_n + h/2)``,
    exact for the homogeneous part and second order in ``h`` for smooth
    forcing.

    ``forcing`` replaces the spike-train secretion with an arbitrary
    vectorised callable of time (used by the tests); ``initial`` is LH_p(0).
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if not 0 < fine_dt <= 0.05:
        raise ValueError("fine_dt must lie in (0, 0.05] h")
    alpha = params.alpha_clear
    if alpha * fine_dt >= 1.0:
        raise ValueError(f"alpha*fine_dt = {alpha * fine_dt:g} >= 1, step too coarse")
    n_steps = int(math.ceil(horizon / fine_dt - 1e-9))
    decay = math.exp(-alpha * fine_dt)
    gain = -math.expm1(-alpha * fine_dt) / alpha
    kern = _kernels.load(backend)
    if forcing is None:
        y = kern.integrate_model(*profile.kernel_args(), float(params.a_spike),
                                 float(params.k_hl), decay, gain, float(fine_dt),
                                 n_steps, float(initial))
    else:
        t_mid = (np.arange(n_steps) + 0.5) * fine_dt
        f_mid = np.asarray(forcing(t_mid), dtype=float) * np.ones(n_steps)
        y = kern.relax(f_mid, decay, gain, float(initial))
    return UniformSeries(0.0, fine_dt, y)


def sampling_count(span, sched):
    """Number of samples whose jittered time stays within ``span`` hours."""
    usable = span - sched.jitter_halfwidth
    if usable < 0:
        return 0
    return int(math.floor(usable / sched.base_interval + 1e-12)) + 1


def sample_series(fine, sched, n_samples=None):
    """Read the fine series at t_i = start_offset + base_interval*i + a(i).

    Values are linearly interpolated between adjacent fine-grid points.  When
    ``n_samples`` is omitted, sampling covers the fine series from
    ``start_offset`` to its end.
    """
    if n_samples is None:
        n_samples = sampling_count(fine.t_end - sched.start_offset, sched)
    if n_samples < 1:
        raise ValueError("fine series too short for any sample")
    times = sched.times(n_samples)
    if times[0] < fine.t0 or times[-1] > fine.t_end:
        bad = times[(times < fine.t0) | (times > fine.t_end)][0]
        raise ValueError(f"sample time {bad:.6g} h lies outside the fine series "
                         f"[{fine.t0:g}, {fine.t_end:g}] h")
    pos = (times - fine.t0) / fine.dt
    idx = np.minimum(np.floor(pos).astype(np.int64), len(fine) - 2)
    frac = pos - idx
    v = fine.values
    values = v[idx] + frac * (v[idx + 1] - v[idx])
    return IrregularSeries(times, values)
