"""Report bundle <-> directory of plot-ready tables plus a JSON manifest."""
from __future__ import annotations

import json
import os

import numpy as np

from .model import IrregularSeries, UniformSeries
from .phases import PHASE_PARAMS, Interval, PhaseRecord
from .pipeline import ReportBundle
from .tables import TableFormatError, read_table, to_float, write_atomic, write_table

RAW_COLS = [("time", "h"), ("lh", "ng/ml")]
DAILY_COLS = [("time", "d"), ("lh", "ng/ml")]
BAND_COLS = [("time", "d"), ("component", "ng/ml"), ("iamp", "ng/ml"), ("ifreq", "1/d")]
PHASE_COLS = [("phase", None), ("t1", "d"), ("t2", "d"), ("xmin", "d"), ("vmin", "ng/ml"),
              ("xmax", "d"), ("vmax", "ng/ml"), ("mean_amp", "ng/ml/d"),
              ("maxmin_amp", "ng/ml"), ("duration", "d"), ("cycle_period", "d"),
              ("truncated", None)]
PARAM_UNITS = {"xmin": "d", "vmin": "ng/ml", "xmax": "d", "vmax": "ng/ml",
               "mean_amp": "ng/ml/d", "maxmin_amp": "ng/ml", "duration": "d",
               "cycle_period": "d"}
MANIFEST = "manifest.json"


def _band_rows(comp, iamp, ifreq):
    return zip(comp.times, comp.values, iamp.values, ifreq.values)


def phase_rows(records):
    for k, r in enumerate(records, start=1):
        yield (k, r.t1, r.t2, r.xmin, r.vmin, r.xmax, r.vmax, r.mean_amp, r.maxmin_amp,
               r.duration, r.cycle_period, bool(r.truncated))


def write_phases(path, records):
    write_table(path, PHASE_COLS, phase_rows(records))


def write_cohort(directory, summary):
    """cohort.csv (per parameter and phase), anova.csv and synchrony.csv."""
    rows = []
    for name in PHASE_PARAMS:
        for j in range(summary.n_phases):
            rows.append((name, PARAM_UNITS[name], j + 1, summary.mean[name][j],
                         summary.sem[name][j]))
    write_table(os.path.join(directory, "cohort.csv"),
                [("parameter", None), ("unit", None), ("phase", None), ("mean", None),
                 ("sem", None)], rows)
    write_table(os.path.join(directory, "anova.csv"),
                [("parameter", None), ("f", None), ("p", None)],
                [(n, summary.anova_f[n], summary.anova_p[n]) for n in PHASE_PARAMS])
    write_table(os.path.join(directory, "synchrony.csv"),
                [("phase", None), ("sem_xmin", "d"), ("sem_xmax", "d")],
                [(j + 1, a, b) for j, (a, b) in
                 enumerate(zip(summary.sem_xmin, summary.sem_xmax))])


def emit_report(bundle, directory):
    """Write every table of ``bundle`` and the manifest into ``directory``."""
    os.makedirs(directory, exist_ok=True)
    p = lambda name: os.path.join(directory, name)  # noqa: E731
    write_table(p("raw.csv"), RAW_COLS, zip(bundle.raw.times, bundle.raw.values))
    write_table(p("daily.csv"), DAILY_COLS, zip(bundle.daily.times, bundle.daily.values))
    write_table(p("lf.csv"), BAND_COLS, _band_rows(bundle.lf, bundle.lf_iamp, bundle.lf_ifreq))
    write_table(p("hf.csv"), BAND_COLS, _band_rows(bundle.hf, bundle.hf_iamp, bundle.hf_ifreq))
    write_phases(p("phases.csv"), bundle.phases)
    files = ["raw.csv", "daily.csv", "lf.csv", "hf.csv", "phases.csv"]
    if bundle.cohort is not None:
        write_cohort(directory, bundle.cohort)
        files += ["cohort.csv", "anova.csv", "synchrony.csv"]
    manifest = {"provenance": bundle.provenance, "files": files,
                "units": {"time": "d", "raw_time": "h", "concentration": "ng/ml"}}
    if bundle.config is not None:
        manifest["config"] = bundle.config.to_dict()
    write_atomic(p(MANIFEST), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return files


def _columns(path, expected):
    cols, rows = read_table(path)
    if [c[0] for c in cols] != [e[0] for e in expected]:
        raise TableFormatError(f"{path}: line 1: expected columns "
                               f"{[e[0] for e in expected]}, got {[c[0] for c in cols]}")
    for (name, unit), (_, want) in zip(cols, expected):
        if unit != want:
            raise TableFormatError(f"{path}: line 1: column {name!r} has unit {unit!r}, "
                                   f"expected {want!r}")
    return rows


def _floats(path, rows, n):
    return np.array([[to_float(r[k], path, ln, str(k)) for k in range(n)] for ln, r in rows],
                    dtype=float).reshape(len(rows), n)


def _uniform(t, v):
    if len(t) < 2:
        raise TableFormatError("uniform table needs at least two rows")
    # the step is known to the table's 9 significant digits
    dt = float(f"{(t[-1] - t[0]) / (len(t) - 1):.9g}")
    return UniformSeries(float(t[0]), dt, v)


def read_band(path):
    a = _floats(path, _columns(path, BAND_COLS), 4)
    t = a[:, 0]
    return _uniform(t, a[:, 1]), _uniform(t, a[:, 2]), _uniform(t, a[:, 3])


def read_phases(path):
    out = []
    for ln, r in _columns(path, PHASE_COLS):
        f = [to_float(x, path, ln, PHASE_COLS[k + 1][0]) for k, x in enumerate(r[1:11])]
        flag = r[11].strip().lower()
        if flag not in ("true", "false"):
            raise TableFormatError(f"{path}: line {ln}: truncated must be true/false")
        out.append(PhaseRecord(*f, truncated=flag == "true"))
    return out


def read_report(directory):
    """Inverse of :func:`emit_report` (cohort tables are not re-read)."""
    p = lambda name: os.path.join(directory, name)  # noqa: E731
    raw = _floats(p("raw.csv"), _columns(p("raw.csv"), RAW_COLS), 2)
    daily = _floats(p("daily.csv"), _columns(p("daily.csv"), DAILY_COLS), 2)
    lf, lf_iamp, lf_ifreq = read_band(p("lf.csv"))
    hf, hf_iamp, hf_ifreq = read_band(p("hf.csv"))
    phases = read_phases(p("phases.csv"))
    with open(p(MANIFEST)) as fh:
        manifest = json.load(fh)
    times = lf_iamp.times
    intervals = [Interval(int(np.argmin(np.abs(times - r.t1))),
                          int(np.argmin(np.abs(times - r.t2))), r.truncated) for r in phases]
    return ReportBundle(IrregularSeries(raw[:, 0], raw[:, 1]),
                        _uniform(daily[:, 0], daily[:, 1]),
                        lf, lf_iamp, lf_ifreq, hf, hf_iamp, hf_ifreq,
                        phases, intervals, manifest.get("provenance", {}))

