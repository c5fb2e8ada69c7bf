"""Activity-phase detection on the LF amplitude and cohort statistics.

Series handed to this module are on a daily grid and expressed in days
(time) and ng/ml (amplitude).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import betainc

P_SENTINEL = 1e-12

PHASE_PARAMS = ("xmin", "vmin", "xmax", "vmax", "mean_amp", "maxmin_amp",
                "duration", "cycle_period")


@dataclass(frozen=True)
class PhaseDetectConfig:
    level_threshold: float = 0.2     # ng/ml
    slope_threshold: float = 7e-3    # ng/ml/day
    derivative_stencil: str = "central2"

    def __post_init__(self):
        if not (self.level_threshold > 0 and self.slope_threshold > 0):
            raise ValueError("phase thresholds must be positive")
        if self.derivative_stencil != "central2":
            raise ValueError(f"unknown derivative stencil {self.derivative_stencil!r}")


@dataclass(frozen=True)
class Interval:
    i1: int
    i2: int
    truncated: bool = False


@dataclass
class PhaseRecord:
    t1: float
    t2: float
    xmin: float
    vmin: float
    xmax: float
    vmax: float
    mean_amp: float
    maxmin_amp: float
    duration: float = math.nan
    cycle_period: float = math.nan
    truncated: bool = False

    def as_dict(self):
        return asdict(self)


@dataclass
class CohortSummary:
    n_animals: int
    n_phases: int
    sem_xmin: list = field(default_factory=list)
    sem_xmax: list = field(default_factory=list)
    mean: dict = field(default_factory=dict)
    sem: dict = field(default_factory=dict)
    anova_f: dict = field(default_factory=dict)
    anova_p: dict = field(default_factory=dict)


def derivative(values, dt=1.0):
    """Central differences inside, one-sided at the two ends."""
    return np.gradient(np.asarray(values, dtype=float), dt)


def detect_phases(lf_amp, cfg=PhaseDetectConfig()):
    """Activity intervals on a daily LF amplitude series.

    A phase opens at the first sample where the level is above
    ``level_threshold`` and the derivative is above ``slope_threshold``,
    after a sample where that was not the case.  It closes at the first
    later sample where the derivative, after having dropped to
    ``-slope_threshold`` or below, is rising and has just climbed above
    ``-slope_threshold``; or at the last sample above the level threshold,
    whichever comes first.  A phase still open at the end is truncated;
    one-sample excursions are dropped.

    Returns a list of :class:`Interval` of sample indices.
    """
    x = np.asarray(lf_amp.values, dtype=float)
    if len(x) < 30:
        raise ValueError("phase detection needs more than 30 daily samples")
    d = derivative(x, lf_amp.dt)
    above = x > cfg.level_threshold
    start_ok = above & (d > cfg.slope_threshold)
    s = cfg.slope_threshold
    phases = []
    i = 1
    n = len(x)
    while i < n:
        if not (start_ok[i] and not start_ok[i - 1]):
            i += 1
            continue
        i1 = i
        fell = False
        end = None
        j = i1 + 1
        while j < n:
            if not above[j]:
                end = j - 1
                break
            if d[j] <= -s:
                fell = True
            elif fell and d[j] > d[j - 1] and d[j - 1] <= -s < d[j]:
                end = j
                break
            j += 1
        if end is None:
            phases.append(Interval(i1, n - 1, True))
            break
        if end > i1:
            # a single-sample excursion is not a phase
            phases.append(Interval(i1, end, False))
        i = end + 1
    return phases


def _gap_min(x, lo, hi):
    seg = x[lo:hi + 1]
    k = int(np.argmin(seg))
    return lo + k


def extract_phase_params(lf_amp, intervals):
    """Extrema, amplitude and timing descriptors for each detected phase.

    Extrema ties resolve to the earliest sample.  ``duration`` runs from
    the midpoint of (xmin, xmax) to the midpoint of (xmax, next xmin);
    ``cycle_period`` is the distance to the next phase's xmax.  Both are NaN
    when they would involve a truncated phase.
    """
    x = np.asarray(lf_amp.values, dtype=float)
    t = lf_amp.times
    n = len(x)
    records = []
    imins, imaxs = [], []
    prev_end = 0
    for iv in intervals:
        imax = iv.i1 + int(np.argmax(x[iv.i1:iv.i2 + 1]))
        imin = _gap_min(x, prev_end, iv.i1)
        imins.append(imin)
        imaxs.append(imax)
        prev_end = iv.i2
    for k, iv in enumerate(intervals):
        imin, imax = imins[k], imaxs[k]
        span = t[imax] - t[imin]
        mean_amp = x[imin:imax + 1].sum() / span if span > 0 else math.nan
        rec = PhaseRecord(
            t1=float(t[iv.i1]), t2=float(t[iv.i2]),
            xmin=float(t[imin]), vmin=float(x[imin]),
            xmax=float(t[imax]), vmax=float(x[imax]),
            mean_amp=float(mean_amp), maxmin_amp=float(x[imax] - x[imin]),
            truncated=iv.truncated)
        if not iv.truncated:
            if k + 1 < len(intervals):
                inext = imins[k + 1]
            else:
                inext = _gap_min(x, iv.i2, n - 1)
            rec.duration = float(0.5 * (t[imax] + t[inext]) - 0.5 * (t[imin] + t[imax]))
            if k + 1 < len(intervals) and not intervals[k + 1].truncated:
                rec.cycle_period = float(t[imaxs[k + 1]] - t[imax])
        records.append(rec)
    return records


def sem(values):
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return math.nan
    return float(np.std(v, ddof=1) / math.sqrt(len(v)))


def cohort_synchrony(records_per_animal, phase_index):
    """SEM (days) of xmin and xmax of one phase across animals; NaN if < 2 animals."""
    present = [recs[phase_index] for recs in records_per_animal if len(recs) > phase_index]
    if len(present) < 2:
        return math.nan, math.nan
    return sem([r.xmin for r in present]), sem([r.xmax for r in present])


def rm_anova(matrix):
    """One-way repeated-measures ANOVA on an animals x phases matrix.

    Returns (F, p).  p comes from the F(k-1, (k-1)(n-1)) upper tail through
    the regularized incomplete beta function.
    """
    y = np.asarray(matrix, dtype=float)
    if y.ndim != 2 or y.shape[0] < 2 or y.shape[1] < 2:
        raise ValueError("rm_anova needs at least 2 animals x 2 phases")
    if not np.all(np.isfinite(y)):
        raise ValueError("rm_anova needs a complete matrix")
    n, k = y.shape
    grand = y.mean()
    ss_total = ((y - grand) ** 2).sum()
    ss_subj = k * ((y.mean(axis=1) - grand) ** 2).sum()
    ss_treat = n * ((y.mean(axis=0) - grand) ** 2).sum()
    ss_error = ss_total - ss_subj - ss_treat
    df1 = k - 1
    df2 = (k - 1) * (n - 1)
    if ss_treat <= 1e-14 * max(ss_total, 1e-300):
        return 0.0, 1.0
    if ss_error <= 1e-14 * ss_total:
        return math.inf, P_SENTINEL
    f = (ss_treat / df1) / (ss_error / df2)
    p = float(betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f)))
    return float(f), max(p, P_SENTINEL)


def cohort_summary(records_per_animal):
    """Synchrony, per-phase mean/SEM and repeated-measures ANOVA over complete phases."""
    complete = [[r for r in recs if not r.truncated] for recs in records_per_animal]
    n_animals = len(complete)
    n_phases = min((len(c) for c in complete), default=0)
    summary = CohortSummary(n_animals, n_phases)
    for j in range(n_phases):
        a, b = cohort_synchrony(complete, j)
        summary.sem_xmin.append(a)
        summary.sem_xmax.append(b)
    for name in PHASE_PARAMS:
        mat = np.array([[getattr(c[j], name) for j in range(n_phases)] for c in complete],
                       dtype=float).reshape(n_animals, n_phases)
        summary.mean[name] = [float(np.mean(mat[:, j])) if n_animals else math.nan
                              for j in range(n_phases)]
        summary.sem[name] = [sem(mat[:, j]) for j in range(n_phases)]
        if n_animals >= 2 and n_phases >= 2 and np.all(np.isfinite(mat)):
            f, p = rm_anova(mat)
        else:
            f, p = math.nan, math.nan
        summary.anova_f[name] = f
        summary.anova_p[name] = p
    return summary
