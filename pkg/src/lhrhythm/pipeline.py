"""Scenario orchestration: simulate, sample, analyse, collect a report bundle.

The model works in hours.  Analysis outputs (daily, LF and HF tables,
phase records) are expressed in days, converted exactly by 1/24.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, _kernels
from .model import IrregularSeries, UniformSeries, integrate_plasma, sample_series
from .phases import cohort_summary, detect_phases, extract_phase_params
from .preprocess import HOURS_PER_DAY, resample_spline
from .tfr import band_amplitude


class StageError(RuntimeError):
    """Failure inside one pipeline stage; ``stage`` names it."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.detail = message


class _stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is None or isinstance(exc, StageError):
            return False
        if isinstance(exc, (ValueError, ArithmeticError, OSError, KeyError)):
            raise StageError(self.name, str(exc)) from exc
        return False


def to_days(series):
    """Hours-based uniform series -> same samples on a day axis."""
    return UniformSeries(series.t0 / HOURS_PER_DAY, series.dt / HOURS_PER_DAY, series.values)


@dataclass(eq=False)
class ReportBundle:
    raw: IrregularSeries                 # hours, ng/ml
    daily: UniformSeries                 # days, ng/ml
    lf: UniformSeries                    # LF component, days
    lf_iamp: UniformSeries
    lf_ifreq: UniformSeries              # cycles/day
    hf: UniformSeries
    hf_iamp: UniformSeries
    hf_ifreq: UniformSeries
    phases: list = field(default_factory=list)
    intervals: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    config: object = None
    cohort: object = None


def _band(daily, band, taps, analysis, workers, backend):
    comp, inst = band_amplitude(daily, band, analysis.spwvd, taps, edge_pad=analysis.edge_pad,
                                workers=workers, backend=backend)
    ifreq = inst.ifreq.with_values(inst.ifreq.values * HOURS_PER_DAY)
    return to_days(comp), to_days(inst.iamp), to_days(ifreq)


def analyze_series(raw, analysis, *, workers=1, backend=None):
    """Full analysis chain on one sampled series; returns a ReportBundle without provenance."""
    with _stage("resample"):
        daily = resample_spline(raw, analysis.daily_dt)
    with _stage("tfr"):
        lf, lf_iamp, lf_ifreq = _band(daily, analysis.lf_band, analysis.lf_taps, analysis,
                                      workers, backend)
        hf, hf_iamp, hf_ifreq = _band(daily, analysis.hf_band, analysis.hf_taps, analysis,
                                      workers, backend)
    with _stage("phases"):
        intervals = detect_phases(lf_iamp, analysis.phase)
        records = extract_phase_params(lf_iamp, intervals)
    return ReportBundle(raw, to_days(daily), lf, lf_iamp, lf_ifreq, hf, hf_iamp, hf_ifreq,
                        records, intervals)


def simulate(cfg, *, backend=None):
    """Integrate the model over the horizon and sample it; returns the raw series (hours)."""
    with _stage("simulate"):
        fine = integrate_plasma(cfg.secretion, cfg.profile, cfg.horizon, cfg.fine_dt,
                                backend=backend)
    with _stage("sample"):
        raw = sample_series(fine, cfg.schedule)
    return IrregularSeries(raw.times, raw.values)


def provenance(cfg, backend=None):
    return {"config_hash": cfg.config_hash(), "seed": int(cfg.schedule.seed),
            "version": __version__, "kernels": _kernels.load(backend).NAME}


def run_scenario(cfg, *, workers=1, backend=None):
    raw = simulate(cfg, backend=backend)
    bundle = analyze_series(raw, cfg.analysis, workers=workers, backend=backend)
    bundle.provenance = provenance(cfg, backend)
    bundle.config = cfg
    return bundle


def run_cohort(cfg, seeds, *, workers=1, backend=None):
    """One simulated animal per seed, run concurrently; returns (bundles, CohortSummary).

    Results are ordered as ``seeds`` regardless of completion order.
    """
    cfgs = [cfg.with_seed(s) for s in seeds]
    if workers > 1 and len(cfgs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            bundles = list(pool.map(lambda c: run_scenario(c, backend=backend), cfgs))
    else:
        bundles = [run_scenario(c, backend=backend) for c in cfgs]
    with _stage("cohort"):
        summary = cohort_summary([b.phases for b in bundles])
    return bundles, summary


def analyze_cohort(series, analysis, *, workers=1, backend=None):
    """Analyse imported series {animal: IrregularSeries}; returns ({animal: bundle}, summary)."""
    names = list(series)

    def one(name):
        try:
            return analyze_series(series[name], analysis, backend=backend)
        except StageError as exc:
            raise StageError(exc.stage, f"animal {name!r}: {exc.detail}") from exc

    if workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(workers) as pool:
            bundles = list(pool.map(one, names))
    else:
        bundles = [one(n) for n in names]
    with _stage("cohort"):
        summary = cohort_summary([b.phases for b in bundles])
    return dict(zip(names, bundles)), summary


def lf_maxima(bundle):
    return np.array([r.vmax for r in bundle.phases])
