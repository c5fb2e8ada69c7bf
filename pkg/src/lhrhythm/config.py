"""Scenario configuration: dataclasses plus a TOML reader/writer.

Every duration in the file carries its unit (``"8760 h"``, ``"152 d"``) and
every rate its inverse unit (``"2 /h"``).
"""
from __future__ import annotations

import hashlib
import json
import math
import re
import sys
from dataclasses import dataclass, field, replace

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .model import HOURS_PER_YEAR, PspikeProfile, SamplingSchedule, SecretionParams
from .phases import PhaseDetectConfig
from .preprocess import HOURS_PER_DAY, BandSpec
from .tfr import SpwvdConfig

_HOURS = {"min": 1 / 60, "h": 1.0, "d": HOURS_PER_DAY, "wk": 7 * HOURS_PER_DAY,
          "y": HOURS_PER_YEAR}
_QTY = re.compile(r"^\s*([-+0-9.eE]+)\s*(/?)\s*([a-z]+)\s*$")


class ConfigError(ValueError):
    pass


def parse_duration(text, key="duration"):
    """``"84 h"`` -> 84.0 (hours)."""
    m = _QTY.match(str(text))
    if not m or m.group(2) or m.group(3) not in _HOURS:
        raise ConfigError(f"{key}: expected a duration with unit "
                          f"({', '.join(_HOURS)}), got {text!r}")
    return float(m.group(1)) * _HOURS[m.group(3)]


def parse_rate(text, key="rate"):
    """``"6 /h"`` -> 6.0 (per hour)."""
    m = _QTY.match(str(text))
    if not m or not m.group(2) or m.group(3) not in _HOURS:
        raise ConfigError(f"{key}: expected a rate such as '6 /h', got {text!r}")
    return float(m.group(1)) / _HOURS[m.group(3)]


def _fmt_hours(h):
    if h % HOURS_PER_DAY == 0 and h >= HOURS_PER_DAY and h % HOURS_PER_YEAR:
        return f"{h / HOURS_PER_DAY:g} d"
    return f"{h:g} h"


def _fmt_days(h):
    return f"{h / HOURS_PER_DAY:g} d"


@dataclass(frozen=True)
class AnalysisConfig:
    daily_dt: float = HOURS_PER_DAY
    lf_band: BandSpec = BandSpec.lowpass(152 * HOURS_PER_DAY)
    hf_band: BandSpec = BandSpec.bandpass(10.5 * HOURS_PER_DAY, 21 * HOURS_PER_DAY)
    lf_taps: int = 511
    hf_taps: int = 255
    spwvd: SpwvdConfig = SpwvdConfig(h_len=127, g_len=127, n_freq_bins=512)
    phase: PhaseDetectConfig = PhaseDetectConfig()
    edge_pad: str = "reflect"

    def __post_init__(self):
        if self.edge_pad not in ("reflect", "zero"):
            raise ConfigError(f"edge_pad must be 'reflect' or 'zero', got {self.edge_pad!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    profile: PspikeProfile = PspikeProfile.damped()
    secretion: SecretionParams = SecretionParams()
    schedule: SamplingSchedule = SamplingSchedule(seed=20020101,
                                                  start_offset=HOURS_PER_YEAR)
    horizon: float = 5 * HOURS_PER_YEAR
    warmup: float = HOURS_PER_YEAR
    fine_dt: float = 0.01
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    output_dir: str = "out"

    def __post_init__(self):
        if not self.horizon > 0 or self.warmup < 0:
            raise ConfigError("horizon must be positive and warmup non-negative")
        if self.warmup >= self.horizon:
            raise ConfigError("warmup must be shorter than the horizon")
        if self.schedule.start_offset != self.warmup:
            object.__setattr__(self, "schedule",
                               replace(self.schedule, start_offset=self.warmup))

    @property
    def sampling_span(self):
        return self.horizon - self.warmup

    def with_seed(self, seed):
        return replace(self, schedule=replace(self.schedule, seed=int(seed)))

    def to_dict(self):
        """Plain, unit-annotated representation (the TOML layout)."""
        p = self.profile
        prof = {"kind": p.kind.value}
        if p.kind.value == "constant":
            prof["p_const"] = _fmt_hours(p.p_const)
        else:
            prof.update(p_min=_fmt_hours(p.p_min), p_max=_fmt_hours(p.p_max),
                        p_photo=_fmt_hours(p.p_photo))
            if p.kind.value == "damped":
                prof["zeta"] = p.zeta
        s = self.secretion
        sch = self.schedule
        a = self.analysis
        return {
            "profile": prof,
            "secretion": {"a_spike_ng": s.a_spike, "k_hl": f"{s.k_hl:g} /h",
                          "alpha_clear": f"{s.alpha_clear:g} /h"},
            "sampling": {"base_interval": _fmt_hours(sch.base_interval),
                         "jitter_halfwidth": _fmt_hours(sch.jitter_halfwidth),
                         "seed": int(sch.seed)},
            "simulation": {"horizon": _fmt_hours(self.horizon),
                           "warmup": _fmt_hours(self.warmup),
                           "fine_dt": _fmt_hours(self.fine_dt)},
            "analysis": {"daily_dt": _fmt_hours(a.daily_dt),
                         "lf_cutoff_period": _fmt_days(a.lf_band.shortest),
                         "hf_period_min": _fmt_days(a.hf_band.shortest),
                         "hf_period_max": _fmt_days(a.hf_band.longest),
                         "lf_taps": a.lf_taps, "hf_taps": a.hf_taps,
                         "edge_pad": a.edge_pad},
            "spwvd": {"h_len": a.spwvd.h_len, "g_len": a.spwvd.g_len,
                      "n_freq_bins": a.spwvd.n_freq_bins,
                      "window": a.spwvd.window_shape.value},
            "phases": {"level_threshold_ng_ml": a.phase.level_threshold,
                       "slope_threshold_ng_ml_day": a.phase.slope_threshold},
            "output": {"dir": self.output_dir},
        }

    def config_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def from_dict(doc):
    """Build a ScenarioConfig from the TOML layout; missing keys keep defaults."""
    base = ScenarioConfig()
    try:
        prof_d = dict(doc.get("profile", {}))
        kind = prof_d.pop("kind", base.profile.kind.value)
        prof_kw = {}
        for key in ("p_const", "p_min", "p_max", "p_photo"):
            if key in prof_d:
                prof_kw[key] = parse_duration(prof_d.pop(key), f"profile.{key}")
        if "zeta" in prof_d:
            prof_kw["zeta"] = float(prof_d.pop("zeta"))
        _no_extra("profile", prof_d)
        profile = PspikeProfile(kind, **prof_kw)

        sec_d = dict(doc.get("secretion", {}))
        secretion = SecretionParams(
            a_spike=float(sec_d.pop("a_spike_ng", base.secretion.a_spike)),
            k_hl=parse_rate(sec_d.pop("k_hl", f"{base.secretion.k_hl} /h"), "secretion.k_hl"),
            alpha_clear=parse_rate(sec_d.pop("alpha_clear", f"{base.secretion.alpha_clear} /h"),
                                   "secretion.alpha_clear"))
        _no_extra("secretion", sec_d)

        sim_d = dict(doc.get("simulation", {}))
        horizon = parse_duration(sim_d.pop("horizon", f"{base.horizon} h"), "simulation.horizon")
        warmup = parse_duration(sim_d.pop("warmup", f"{base.warmup} h"), "simulation.warmup")
        fine_dt = parse_duration(sim_d.pop("fine_dt", f"{base.fine_dt} h"), "simulation.fine_dt")
        _no_extra("simulation", sim_d)

        smp_d = dict(doc.get("sampling", {}))
        schedule = SamplingSchedule(
            base_interval=parse_duration(smp_d.pop("base_interval", "84 h"),
                                         "sampling.base_interval"),
            jitter_halfwidth=parse_duration(smp_d.pop("jitter_halfwidth", "0.5 h"),
                                            "sampling.jitter_halfwidth"),
            seed=int(smp_d.pop("seed", base.schedule.seed)),
            start_offset=warmup)
        _no_extra("sampling", smp_d)

        ba = base.analysis
        an_d = dict(doc.get("analysis", {}))
        sp_d = dict(doc.get("spwvd", {}))
        ph_d = dict(doc.get("phases", {}))
        analysis = AnalysisConfig(
            daily_dt=parse_duration(an_d.pop("daily_dt", "24 h"), "analysis.daily_dt"),
            lf_band=BandSpec.lowpass(parse_duration(an_d.pop("lf_cutoff_period", "152 d"),
                                                    "analysis.lf_cutoff_period")),
            hf_band=BandSpec.bandpass(
                parse_duration(an_d.pop("hf_period_min", "10.5 d"), "analysis.hf_period_min"),
                parse_duration(an_d.pop("hf_period_max", "21 d"), "analysis.hf_period_max")),
            lf_taps=int(an_d.pop("lf_taps", ba.lf_taps)),
            hf_taps=int(an_d.pop("hf_taps", ba.hf_taps)),
            edge_pad=str(an_d.pop("edge_pad", ba.edge_pad)),
            spwvd=SpwvdConfig(h_len=int(sp_d.pop("h_len", ba.spwvd.h_len)),
                              g_len=int(sp_d.pop("g_len", ba.spwvd.g_len)),
                              n_freq_bins=int(sp_d.pop("n_freq_bins", ba.spwvd.n_freq_bins)),
                              window_shape=sp_d.pop("window", ba.spwvd.window_shape.value)),
            phase=PhaseDetectConfig(
                level_threshold=float(ph_d.pop("level_threshold_ng_ml",
                                               ba.phase.level_threshold)),
                slope_threshold=float(ph_d.pop("slope_threshold_ng_ml_day",
                                               ba.phase.slope_threshold))))
        for name, rest in (("analysis", an_d), ("spwvd", sp_d), ("phases", ph_d)):
            _no_extra(name, rest)
        out_d = dict(doc.get("output", {}))
        output_dir = str(out_d.pop("dir", base.output_dir))
        _no_extra("output", out_d)
        unknown = set(doc) - {"profile", "secretion", "simulation", "sampling", "analysis",
                              "spwvd", "phases", "output"}
        if unknown:
            raise ConfigError(f"unknown section(s): {sorted(unknown)}")
        return ScenarioConfig(profile=profile, secretion=secretion, schedule=schedule,
                              horizon=horizon, warmup=warmup, fine_dt=fine_dt,
                              analysis=analysis, output_dir=output_dir)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _no_extra(section, rest):
    if rest:
        raise ConfigError(f"unknown key(s) in [{section}]: {sorted(rest)}")


def load_config(path):
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return from_dict(doc)


def loads_config(text):
    return from_dict(tomllib.loads(text))


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return repr(v) if isinstance(v, float) and math.isfinite(v) else str(v)
    return json.dumps(v)


def dumps_config(cfg):
    lines = []
    for section, body in cfg.to_dict().items():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {_toml_value(v)}" for k, v in body.items())
        lines.append("")
    return "\n".join(lines)


def builtin_defaults(kind="damped"):
    """Built-in parameter set for the sinusoid or damped drive."""
    profile = PspikeProfile.damped() if kind == "damped" else PspikeProfile.sinusoid()
    return ScenarioConfig(profile=profile)
