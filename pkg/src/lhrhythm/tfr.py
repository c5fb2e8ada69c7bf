"""Smoothed pseudo Wigner-Ville distribution and its frequency moments.

The discrete distribution is

    SPW(n, nu) = 2 dt * sum_m g(m) sum_tau h(tau)^2 z(n+m+tau) z*(n+m-tau) exp(-4 i pi nu tau dt)

i.e. the continuous definition with lag step 2*dt.  With this scaling the
frequency marginal of the unsmoothed distribution is |z(n)|^2, so that
``IPow`` is in squared signal units.  The frequency axis holds
``n_freq_bins`` bins spaced 1/(2 * n_freq_bins * dt) from 0 up to (but not
including) the Nyquist frequency.
"""
from __future__ import annotations

import enum
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import hilbert
from scipy.signal.windows import gaussian

from . import _kernels
from .model import UniformSeries
from .preprocess import extract_band

# time columns per work unit; fixed so results do not depend on worker count
BLOCK = 128
IMAG_TOL = 1e-10
GAP_REL = 1e-12


class WindowShape(str, enum.Enum):
    HAMMING = "hamming"
    GAUSSIAN = "gaussian"
    RECTANGULAR = "rectangular"


def _window(shape, n):
    if shape is WindowShape.HAMMING:
        return np.hamming(n) if n > 1 else np.ones(1)
    if shape is WindowShape.GAUSSIAN:
        return gaussian(n, std=max((n - 1) / 6.0, 1e-12))
    return np.ones(n)


@dataclass(frozen=True)
class SpwvdConfig:
    h_len: int = 127
    g_len: int = 63
    n_freq_bins: int = 512
    window_shape: WindowShape = WindowShape.HAMMING

    def __post_init__(self):
        object.__setattr__(self, "window_shape", WindowShape(self.window_shape))
        if self.h_len < 1 or self.h_len % 2 == 0:
            raise ValueError("h_len must be a positive odd integer")
        if self.g_len < 1 or self.g_len % 2 == 0:
            raise ValueError("g_len must be a positive odd integer")
        n = self.n_freq_bins
        if n < 2 or n & (n - 1):
            raise ValueError("n_freq_bins must be a power of two")
        if n < self.h_len:
            raise ValueError("n_freq_bins must be at least h_len")

    @classmethod
    def unsmoothed(cls, length, n_freq_bins=None):
        """Plain WVD for a record of ``length`` samples: g a unit impulse, h flat.

        For even ``length`` the lag window covers every lag the record has.
        """
        h_len = length - 1 if length % 2 == 0 else length - 2
        n = n_freq_bins or 1 << (h_len - 1).bit_length()
        return cls(h_len, 1, n, WindowShape.RECTANGULAR)

    @property
    def margin(self):
        """Samples at each end affected by zero padding."""
        return (self.h_len + self.g_len) // 2

    def time_window(self):
        g = _window(self.window_shape, self.g_len)
        return g / g.sum()

    def lag_window_sq(self):
        """h(tau)^2 for tau = 0 .. (h_len-1)/2, with h(0) = 1."""
        h = _window(self.window_shape, self.h_len)
        half = (self.h_len - 1) // 2
        h = h[half:] / h[half]
        return h * h


@dataclass(frozen=True, eq=False)
class TimeFrequencyMap:
    t0: float
    dt: float
    freqs: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @property
    def dnu(self):
        return self.freqs[1] - self.freqs[0]


@dataclass(frozen=True, eq=False)
class InstantSeries:
    ipow: UniformSeries
    ifreq: UniformSeries
    iamp: UniformSeries | None = None


def analytic_signal(x):
    """Complex analytic signal of a real uniform series (FFT Hilbert transform)."""
    if len(x) < 8:
        raise ValueError("analytic signal needs at least 8 samples")
    return x.with_values(hilbert(np.asarray(x.values, dtype=float)))


def spwvd(z, cfg, *, workers=1, backend=None):
    """Discrete SPWVD of a complex series.

    Time columns are processed in fixed blocks of ``BLOCK``; ``workers``
    only changes how blocks are scheduled, never the arithmetic.
    """
    values = np.ascontiguousarray(z.values, dtype=complex)
    n_t = len(values)
    if n_t < cfg.h_len + cfg.g_len:
        raise ValueError(f"series of length {n_t} shorter than window support "
                         f"{cfg.h_len + cfg.g_len}")
    kern = _kernels.load(backend)
    g = np.ascontiguousarray(cfg.time_window())
    h2 = np.ascontiguousarray(cfg.lag_window_sq())
    nfft = cfg.n_freq_bins
    n_lag = len(h2)
    scale = 2.0 * z.dt

    def block(start):
        stop = min(start + BLOCK, n_t)
        r = kern.lag_products(values, g, h2, start, stop)
        buf = np.zeros((stop - start, nfft), dtype=complex)
        buf[:, :n_lag] = r
        # R(-tau) = conj(R(tau))
        buf[:, nfft - n_lag + 1:] = np.conj(r[:, :0:-1])
        return np.fft.fft(buf, axis=1)

    starts = range(0, n_t, BLOCK)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            spec = np.concatenate(list(pool.map(block, starts)))
    else:
        spec = np.concatenate([block(s) for s in starts])
    peak = np.abs(spec).max()
    resid = np.abs(spec.imag).max()
    if peak > 0 and resid > IMAG_TOL * peak:
        raise ArithmeticError(f"SPWVD imaginary residue {resid / peak:.3g} exceeds tolerance")
    freqs = np.arange(nfft) / (2.0 * nfft * z.dt)
    return TimeFrequencyMap(z.t0, z.dt, freqs, scale * spec.real)


def spwvd_direct(z, cfg, times=None, freqs=None):
    """Reference double-sum evaluation of the SPWVD (slow; no FFT).

    Returns an array of shape (len(times), len(freqs)) evaluated at sample
    indices ``times`` and frequencies ``freqs`` (cycles per time unit).
    """
    values = np.asarray(z.values, dtype=complex)
    n_t = len(values)
    times = np.arange(n_t) if times is None else np.asarray(times)
    if freqs is None:
        freqs = np.arange(cfg.n_freq_bins) / (2.0 * cfg.n_freq_bins * z.dt)
    g = cfg.time_window()
    h2 = cfg.lag_window_sq()
    half_g = (cfg.g_len - 1) // 2
    half_h = len(h2) - 1
    out = np.zeros((len(times), len(freqs)))
    for row, n in enumerate(times):
        for col, nu in enumerate(freqs):
            acc = 0j
            for mi, gm in enumerate(g):
                c = n + mi - half_g
                for tau in range(-half_h, half_h + 1):
                    a, b = c + tau, c - tau
                    if 0 <= a < n_t and 0 <= b < n_t:
                        acc += (gm * h2[abs(tau)] * values[a] * np.conj(values[b])
                                * np.exp(-4j * np.pi * nu * tau * z.dt))
            out[row, col] = 2.0 * z.dt * acc.real
    return out


def instantaneous_moments(m):
    """IPow and IF from the zeroth and first frequency moments.

    The discrete distribution is periodic in frequency with period equal to
    the axis length, so the first moment is taken on the circle: energy that
    the frequency smoothing spreads below 0 Hz reappears at the top of the
    axis and must count as slightly negative, not as near-Nyquist.  For
    content that does not wrap this equals the usual ratio of moments.

    IF lies in [0, Nyquist) and is NaN (gap marker) where IPow is negligible.
    """
    dnu = m.dnu
    period = dnu * len(m.freqs)
    ipow = m.values.sum(axis=1) * dnu
    turn = np.exp(2j * np.pi * m.freqs / period)
    angle = np.angle(m.values @ turn)
    ifreq = np.mod(angle, 2 * np.pi) / (2 * np.pi) * period
    top = np.abs(ipow).max() if len(ipow) else 0.0
    gap = np.abs(ipow) <= GAP_REL * top
    ifreq = np.where(gap, np.nan, ifreq)
    return InstantSeries(UniformSeries(m.t0, m.dt, ipow), UniformSeries(m.t0, m.dt, ifreq))


def instantaneous_amplitude(ipow, alpha_cal):
    p = np.asarray(ipow.values, dtype=float)
    top = np.abs(p).max() if len(p) else 0.0
    floor = -GAP_REL * top
    if np.any(p < floor):
        raise ValueError(f"negative instantaneous power {p.min():.3g}")
    return ipow.with_values(alpha_cal * np.sqrt(np.clip(p, 0.0, None)))


def _calibration_length(cfg, num_taps):
    n = 4 * (cfg.h_len + cfg.g_len + num_taps)
    return 1 << (n - 1).bit_length()


@functools.lru_cache(maxsize=64)
def calibrate_amplitude(cfg, band, dt, num_taps=255):
    """alpha such that a unit sinusoid at the band centre gives IAmp = 1."""
    n = _calibration_length(cfg, num_taps)
    f0 = band.center_frequency()
    tone = UniformSeries(0.0, dt, np.cos(2 * np.pi * f0 * dt * np.arange(n)))
    chain = extract_band(tone, band, num_taps)
    mom = instantaneous_moments(spwvd(analytic_signal(chain), cfg))
    edge = cfg.margin + num_taps
    power = np.median(mom.ipow.values[edge:n - edge])
    return 1.0 / math.sqrt(power)


def band_amplitude(x, band, cfg, num_taps=255, *, edge_pad="zero", workers=1, backend=None):
    """Band-filtered component and its calibrated instantaneous moments.

    ``x`` is the (uniform) input series; returns (component, InstantSeries).
    With ``edge_pad="reflect"`` the component is mirrored by ``cfg.margin``
    samples at both ends before the distribution is formed, which avoids the
    amplitude dip that zero padding causes near the record edges.
    """
    comp = extract_band(x, band, num_taps)
    if edge_pad == "reflect":
        m = min(cfg.margin, len(comp) - 1)
        padded = UniformSeries(comp.t0 - m * comp.dt, comp.dt,
                               np.pad(comp.values, m, mode="reflect"))
    elif edge_pad == "zero":
        m, padded = 0, comp
    else:
        raise ValueError(f"unknown edge_pad {edge_pad!r}")
    tfm = spwvd(analytic_signal(padded), cfg, workers=workers, backend=backend)
    mom = instantaneous_moments(tfm)
    n = len(comp)
    ipow = UniformSeries(comp.t0, comp.dt, mom.ipow.values[m:m + n].copy())
    ifreq = UniformSeries(comp.t0, comp.dt, mom.ifreq.values[m:m + n].copy())
    alpha = calibrate_amplitude(cfg, band, x.dt, num_taps)
    return comp, InstantSeries(ipow, ifreq, instantaneous_amplitude(ipow, alpha))
