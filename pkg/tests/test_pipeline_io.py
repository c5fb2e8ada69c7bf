import json
import math
import os

import numpy as np
import pytest

from lhrhythm.config import builtin_defaults
from lhrhythm.model import IrregularSeries
from lhrhythm.pipeline import ReportBundle, StageError, analyze_series, run_cohort, simulate
from lhrhythm.preprocess import HOURS_PER_DAY
from lhrhythm.report import emit_report, read_report
from lhrhythm.tables import TableFormatError, export_series, fmt, import_series, read_table


def close(a, b, rel=5e-9):
    a, b = np.asarray(a, float), np.asarray(b, float)
    both_nan = np.isnan(a) & np.isnan(b)
    ok = np.abs(a - b) <= rel * np.maximum(np.abs(a), np.abs(b)) + 1e-300
    return bool(np.all(both_nan | ok))


class TestImport:
    def test_two_row_file(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("time (h),lh (ng/ml)\n0,1.5\n84,0.1\n")
        series = import_series(p)
        s = series["1"]
        assert list(s.times) == [0.0, 84.0] and list(s.values) == [1.5, 0.1]
        assert list(s.below_floor) == [False, True]

    def test_day_units_converted(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("animal,time (d),lh (ng/ml)\na,1,1\na,4.5,2\n")
        assert list(import_series(p)["a"].times) == [24.0, 108.0]

    def test_duplicate_timestamp_names_line(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("animal,time (h),lh (ng/ml)\nx,0,1\nx,84,2\nx,84,3\n")
        with pytest.raises(TableFormatError, match="line 4"):
            import_series(p)

    @pytest.mark.parametrize("body,line", [("0,1\n-5,2\n", 3), ("0,abc\n", 2), ("0,1,2\n", 2)])
    def test_malformed_rows(self, tmp_path, body, line):
        p = tmp_path / "s.csv"
        p.write_text("time (h),lh (ng/ml)\n" + body)
        with pytest.raises(TableFormatError, match=f"line {line}"):
            import_series(p)

    def test_bad_time_unit(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("time (s),lh (ng/ml)\n0,1\n")
        with pytest.raises(TableFormatError, match="line 1"):
            import_series(p)

    def test_export_import_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        series = {"a": IrregularSeries(np.cumsum(rng.uniform(80, 88, 30)), rng.lognormal(size=30)),
                  "b": IrregularSeries(np.arange(5) * 84.0 + 1 / 3, np.pi * np.arange(5))}
        p = tmp_path / "out.csv"
        export_series(p, series)
        back = import_series(p)
        assert set(back) == {"a", "b"}
        for k in series:
            assert close(back[k].times, series[k].times) and close(back[k].values, series[k].values)


def test_number_format():
    assert fmt(1 / 3) == "0.333333333"
    assert fmt(123456789.123) == "123456789"
    assert fmt(math.nan) == "NaN"
    assert fmt(True) == "true" and fmt(7) == "7"


class TestReport:
    def test_round_trip(self, tmp_path, sinusoid_bundle):
        emit_report(sinusoid_bundle, tmp_path)
        back = read_report(tmp_path)
        b = sinusoid_bundle
        assert close(back.raw.times, b.raw.times) and close(back.raw.values, b.raw.values)
        for name in ("daily", "lf", "lf_iamp", "lf_ifreq", "hf", "hf_iamp", "hf_ifreq"):
            ours, theirs = getattr(b, name), getattr(back, name)
            assert len(ours) == len(theirs)
            assert close(theirs.times, ours.times) and close(theirs.values, ours.values)
        assert len(back.phases) == len(b.phases)
        for r1, r2 in zip(b.phases, back.phases):
            d1, d2 = r1.as_dict(), r2.as_dict()
            assert d1.pop("truncated") == d2.pop("truncated")
            assert close(list(d1.values()), list(d2.values()))
        assert back.intervals == b.intervals
        assert back.provenance == b.provenance

    def test_units_exact_day_conversion(self, sinusoid_bundle):
        b = sinusoid_bundle
        assert b.daily.dt == 1.0
        assert b.daily.t0 == b.raw.times[0] / HOURS_PER_DAY

    def test_headers_carry_units(self, tmp_path, sinusoid_bundle):
        emit_report(sinusoid_bundle, tmp_path)
        for name in ("raw.csv", "daily.csv", "lf.csv", "hf.csv"):
            cols, _ = read_table(tmp_path / name)
            assert all(unit for _, unit in cols)

    def test_manifest_has_config_hash(self, tmp_path, sinusoid_bundle):
        emit_report(sinusoid_bundle, tmp_path)
        m = json.loads((tmp_path / "manifest.json").read_text())
        cfg = builtin_defaults("sinusoid")
        assert m["provenance"]["config_hash"] == cfg.config_hash()
        assert m["provenance"]["seed"] == cfg.schedule.seed
        assert {"version", "kernels"} <= set(m["provenance"])

    def test_empty_phase_table_is_header_only(self, tmp_path, sinusoid_bundle):
        b = sinusoid_bundle
        empty = ReportBundle(b.raw, b.daily, b.lf, b.lf_iamp, b.lf_ifreq, b.hf, b.hf_iamp,
                             b.hf_ifreq, [], [], b.provenance)
        emit_report(empty, tmp_path)
        lines = (tmp_path / "phases.csv").read_text().splitlines()
        assert len(lines) == 1 and lines[0].startswith("phase,t1 (d),t2 (d)")
        assert read_report(tmp_path).phases == []

    def test_no_stray_temp_files(self, tmp_path, sinusoid_bundle):
        emit_report(sinusoid_bundle, tmp_path)
        assert not [f for f in os.listdir(tmp_path) if f.startswith(".tmp-")]


class TestPipeline:
    def test_scenario_chain(self, sinusoid_bundle):
        b = sinusoid_bundle
        assert len(b.raw) == 418
        assert len(b.daily) == len(b.lf_iamp) == len(b.hf_iamp)
        assert np.all(b.lf_iamp.values >= 0) and np.all(b.hf_iamp.values >= 0)
        assert len(b.phases) == 4

    def test_damped_four_phases(self, damped_bundle):
        assert len(damped_bundle.phases) == 4

    def test_stage_tagged_error(self):
        tiny = IrregularSeries([0.0, 84.0, 168.0], [1.0, 2.0, 3.0])
        with pytest.raises(StageError) as info:
            analyze_series(tiny, builtin_defaults().analysis)
        assert info.value.stage == "resample" and str(info.value).startswith("[resample]")

    def test_short_record_fails_in_tfr(self):
        t = np.arange(60) * 84.0
        with pytest.raises(StageError) as info:
            analyze_series(IrregularSeries(t, np.ones(60)), builtin_defaults().analysis)
        assert info.value.stage == "tfr"

    def test_simulation_deterministic(self):
        cfg = builtin_defaults("sinusoid").with_seed(3)
        a, b = simulate(cfg), simulate(cfg)
        assert a.times.tobytes() == b.times.tobytes() and a.values.tobytes() == b.values.tobytes()

    def test_cohort_order_and_summary(self):
        cfg = builtin_defaults("sinusoid")
        seeds = [11, 12, 13]
        serial, s1 = run_cohort(cfg, seeds, workers=1)
        threaded, s2 = run_cohort(cfg, seeds, workers=3)
        for a, b in zip(serial, threaded):
            assert a.provenance == b.provenance
            assert a.lf_iamp.values.tobytes() == b.lf_iamp.values.tobytes()
        assert [b.provenance["seed"] for b in serial] == seeds
        assert s1.n_animals == 3 and s1.n_phases >= 2
        assert s1.sem_xmax == s2.sem_xmax
        assert all(0 < p <= 1 for p in s1.anova_p.values() if not math.isnan(p))
