"""numpy implementations of the hot loops (fallback when the extension is absent)."""
import math

import numpy as np
from scipy.signal import lfilter

NAME = "numpy"


def pspike(kind, p_const, p_min, dp, p_photo, zeta, k, t):
    if kind == 0:
        return np.full_like(t, p_const)
    w = 2.0 * math.pi / p_photo
    out = 0.5 * dp * (np.sin(w * t) + 1.0) + p_min
    if kind == 2:
        damped = (0.5 * dp * (np.sin(math.sqrt(1.0 - zeta * zeta) * w * t) + 1.0)
                  * k * np.exp(-zeta * w * (t - p_photo)) + p_min)
        out = np.where(t < p_photo, out, damped)
    return out


def relax(f_mid, decay, gain, y0):
    """y[0] = y0; y[n+1] = decay*y[n] + gain*f_mid[n]."""
    y = np.empty(len(f_mid) + 1)
    y[0] = y0
    y[1:], _ = lfilter([gain], [1.0, -decay], f_mid, zi=[decay * y0])
    return y


def integrate_model(kind, p_const, p_min, dp, p_photo, zeta, k,
                    a_spike, k_hl, decay, gain, dt, n_steps, y0):
    chunk = 1 << 20
    y = np.empty(n_steps + 1)
    y[0] = y0
    for start in range(0, n_steps, chunk):
        stop = min(start + chunk, n_steps)
        tm = (np.arange(start, stop) + 0.5) * dt
        p = pspike(kind, p_const, p_min, dp, p_photo, zeta, k, tm)
        f = a_spike * np.exp(-k_hl * (tm - np.floor(tm / p) * p))
        y[start:stop + 1] = relax(f, decay, gain, y[start])
    return y


def lag_products(z, g, h2, n_start, n_stop):
    """Time-smoothed, lag-windowed instantaneous autocorrelation.

    Row ``n - n_start``, column ``tau`` holds
    ``h2[tau] * sum_m g[m] z[n+m+tau] conj(z[n+m-tau])`` for ``tau >= 0``,
    with ``z`` zero outside its support.
    """
    n_lag = len(h2)
    half_g = (len(g) - 1) // 2
    pad = half_g + n_lag - 1
    zp = np.zeros(len(z) + 2 * pad, dtype=complex)
    zp[pad:pad + len(z)] = z
    rows = n_stop - n_start
    out = np.empty((rows, n_lag), dtype=complex)
    # products at shifted centres c = n + m, m in [-half_g, half_g]
    c0 = pad + n_start - half_g
    width = rows + 2 * half_g
    for tau in range(n_lag):
        prod = zp[c0 + tau:c0 + tau + width] * np.conj(zp[c0 - tau:c0 - tau + width])
        out[:, tau] = h2[tau] * np.correlate(prod, g, mode="valid")
    return out
