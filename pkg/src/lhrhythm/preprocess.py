"""Daily resampling and mono-frequency band extraction.

Irregular assay series are put on a uniform grid with a natural cubic spline,
then split into a low-frequency (circannual) and a high-frequency (sampling
band) component with linear-phase FIR filters applied without delay.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .model import UniformSeries

HOURS_PER_DAY = 24.0


class BandKind(str, enum.Enum):
    LOWPASS = "lowpass"
    BANDPASS = "bandpass"


@dataclass(frozen=True)
class BandSpec:
    """Pass band described by periods in hours.

    A low-pass keeps every period longer than ``shortest`` (the cutoff
    period); a band-pass keeps periods between ``shortest`` and ``longest``.
    """

    kind: BandKind
    shortest: float
    longest: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "kind", BandKind(self.kind))
        if not self.shortest > 0:
            raise ValueError("period bounds must be positive")
        if self.kind is BandKind.BANDPASS and not self.shortest < self.longest < math.inf:
            raise ValueError("band-pass needs 0 < shortest < longest < inf")

    @classmethod
    def lowpass(cls, cutoff_period):
        return cls(BandKind.LOWPASS, cutoff_period)

    @classmethod
    def bandpass(cls, shortest, longest):
        return cls(BandKind.BANDPASS, shortest, longest)

    def center_frequency(self):
        """Reference frequency (cycles/hour) used for amplitude calibration."""
        if self.kind is BandKind.LOWPASS:
            return 0.5 / self.shortest
        return 1.0 / math.sqrt(self.shortest * self.longest)


# 5 months, and 1.5 to 3 weeks, at calendar-average lengths
LF_BAND = BandSpec.lowpass(152 * HOURS_PER_DAY)
HF_BAND = BandSpec.bandpass(10.5 * HOURS_PER_DAY, 21 * HOURS_PER_DAY)


@dataclass(frozen=True, eq=False)
class FilterKernel:
    taps: np.ndarray = field(repr=False)

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=float)
        object.__setattr__(self, "taps", taps)
        if taps.ndim != 1 or len(taps) % 2 == 0:
            raise ValueError("filter kernel needs an odd number of taps")

    def __len__(self):
        return len(self.taps)

    @property
    def nominal_delay(self):
        return (len(self.taps) - 1) // 2

    def response(self, freq, dt):
        """Zero-phase frequency response at ``freq`` cycles/hour (real, delay removed)."""
        m = np.arange(len(self.taps)) - self.nominal_delay
        freq = np.atleast_1d(np.asarray(freq, dtype=float))
        return np.cos(2 * np.pi * np.outer(freq * dt, m)) @ self.taps


def resample_spline(raw, dt=HOURS_PER_DAY):
    """Natural cubic spline through ``raw`` evaluated every ``dt`` hours.

    The grid starts at the first raw time and stops at or before the last.
    """
    if len(raw) < 4:
        raise ValueError(f"spline resampling needs at least 4 points, got {len(raw)}")
    if not dt > 0:
        raise ValueError("dt must be positive")
    t = raw.times
    if np.any(np.diff(t) <= 0):
        raise ValueError("duplicate or decreasing timestamps")
    n = int(math.floor((t[-1] - t[0]) / dt + 1e-9)) + 1
    grid = t[0] + dt * np.arange(n)
    spline = CubicSpline(t, raw.values, bc_type="natural")
    return UniformSeries(float(t[0]), float(dt), spline(grid))


def _lowpass_taps(fc, num_taps):
    # fc in cycles/sample; unit DC gain by construction
    m = np.arange(num_taps) - (num_taps - 1) / 2
    taps = 2 * fc * np.sinc(2 * fc * m) * np.hamming(num_taps)
    return taps / taps.sum()


def design_fir(spec, dt=HOURS_PER_DAY, num_taps=255):
    """Hamming-windowed sinc, linear phase.

    The sinc edges sit at the reciprocal period bounds (half-amplitude
    points).  A low-pass is normalised to unit DC gain, a band-pass to unit
    gain at its geometric centre frequency.
    """
    if num_taps % 2 == 0 or num_taps < 31:
        raise ValueError(f"num_taps must be odd and >= 31, got {num_taps}")
    nyquist = 0.5 / dt
    f_hi = 1.0 / spec.shortest
    if f_hi >= nyquist:
        raise ValueError(f"cutoff {f_hi:g} 1/h is at or above Nyquist {nyquist:g} 1/h")
    if spec.kind is BandKind.LOWPASS:
        return FilterKernel(_lowpass_taps(f_hi * dt, num_taps))
    f_lo = 1.0 / spec.longest
    taps = _lowpass_taps(f_hi * dt, num_taps) - _lowpass_taps(f_lo * dt, num_taps)
    # scaling keeps the zero DC sum
    gain = FilterKernel(taps).response(spec.center_frequency(), dt)[0]
    return FilterKernel(taps / gain)


def filter_zero_phase(x, kernel):
    """Convolve with ``kernel`` and remove its group delay.

    Ends are extended by mirror reflection so the output keeps the input
    length and alignment.
    """
    values = np.asarray(x.values, dtype=float)
    n = len(values)
    k = len(kernel)
    if n <= k:
        raise ValueError(f"series of length {n} must be longer than the kernel ({k} taps)")
    ext = np.pad(values, kernel.nominal_delay, mode="reflect")
    out = np.convolve(ext, kernel.taps, mode="valid")
    return x.with_values(out)


def extract_band(x, spec, num_taps=255):
    return filter_zero_phase(x, design_fir(spec, x.dt, num_taps))
