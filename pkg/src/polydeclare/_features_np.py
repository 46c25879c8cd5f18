"""Pure-numpy reference implementations of the 22 canonical summary features.

This is the readable path: FFT-based autocorrelation, ``np.histogram``-style
binning, ``np.polyfit`` detrending.  The JIT twin in ``_features_nb`` computes
the same pinned definitions through different numerical routes (direct sums,
explicit DFT, hand-rolled binning); tests require the two paths to agree to
1e-6, which is what stands in for an external reference build.

All features operate on the z-scored series (population std).  The caller
guarantees ``len(x) >= 3`` and non-zero variance; every helper still returns
finite numbers for the edge cases it can reach.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["compute22"]


def _acf(v: np.ndarray) -> np.ndarray:
    """Statistical autocorrelation for all lags 0..len-1 via FFT."""
    n = v.size
    vc = v - v.mean()
    denom = float(np.dot(vc, vc))
    if denom <= 0.0:
        out = np.zeros(n)
        out[0] = 1.0
        return out
    nfft = 1 << (2 * n - 1).bit_length()
    spec = np.fft.rfft(vc, nfft)
    acov = np.fft.irfft(spec * np.conj(spec))[:n]
    return acov / denom


def _first_zero(ac: np.ndarray) -> int:
    """First lag with non-positive autocorrelation; series length if none."""
    for k in range(1, ac.size):
        if ac[k] <= 0.0:
            return k
    return ac.size


def _histogram_mode(z: np.ndarray, n_bins: int) -> float:
    lo, hi = float(z.min()), float(z.max())
    if hi <= lo:
        return lo
    counts, edges = np.histogram(z, bins=np.linspace(lo, hi, n_bins + 1))
    centers = (edges[:-1] + edges[1:]) / 2.0
    best = counts.max()
    return float(centers[counts == best].mean())


def _f1ecac(ac: np.ndarray) -> float:
    thresh = 1.0 / math.e
    for k in range(1, ac.size):
        if ac[k] < thresh:
            # linear interpolation between the straddling lags
            return (k - 1) + (thresh - ac[k - 1]) / (ac[k] - ac[k - 1])
    return float(ac.size)


def _first_min(values: np.ndarray, default: int) -> int:
    for k in range(1, values.size - 1):
        if values[k] < values[k - 1] and values[k] < values[k + 1]:
            return k
    return default


def _histogram_ami(z: np.ndarray, tau: int, n_bins: int) -> float:
    if z.size <= tau:
        return 0.0
    lo, hi = float(z.min()) - 0.1, float(z.max()) + 0.1
    edges = np.linspace(lo, hi, n_bins + 1)
    joint, _, _ = np.histogram2d(z[:-tau], z[tau:], bins=(edges, edges))
    m = float(joint.sum())
    if m <= 0:
        return 0.0
    p = joint / m
    pi = p.sum(axis=1)
    pj = p.sum(axis=0)
    mask = p > 0
    outer = np.outer(pi, pj)
    return float(np.sum(p[mask] * np.log(p[mask] / outer[mask])))


def _longest_run(flags: np.ndarray) -> int:
    best = cur = 0
    for f in flags:
        cur = cur + 1 if f else 0
        best = max(best, cur)
    return best


def _tercile_letters(v: np.ndarray) -> np.ndarray:
    q1, q2 = np.quantile(v, [1.0 / 3.0, 2.0 / 3.0])
    return np.where(v <= q1, 0, np.where(v <= q2, 1, 2)).astype(np.int64)


def _motif_three_hh(z: np.ndarray) -> float:
    letters = _tercile_letters(z)
    pairs = letters[:-1] * 3 + letters[1:]
    counts = np.bincount(pairs, minlength=9).astype(np.float64)
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-np.sum(p * np.log(p)))


def _embed2_expfit_meandiff(z: np.ndarray, ac: np.ndarray) -> float:
    n = z.size
    tau = min(_first_zero(ac), n // 10)
    tau = max(tau, 1)
    m = n - tau - 1
    if m < 2:
        return 0.0
    d = np.hypot(z[1 : m + 1] - z[:m], z[tau + 1 : tau + m + 1] - z[tau : tau + m])
    scale = float(d.mean())
    if scale <= 0:
        return 0.0
    n_bins = math.ceil(math.sqrt(m))
    lo, hi = float(d.min()), float(d.max())
    if hi <= lo:
        return 0.0
    edges = np.linspace(lo, hi, n_bins + 1)
    counts, _ = np.histogram(d, bins=edges)
    width = edges[1] - edges[0]
    if width <= 0:  # hi - lo can collapse to one ulp and vanish in linspace
        return 0.0
    density = counts / (m * width)
    centers = (edges[:-1] + edges[1:]) / 2.0
    fitted = np.exp(-centers / scale) / scale
    return float(np.abs(density - fitted).mean())


def _local_simple_mean_residuals(z: np.ndarray, window: int) -> np.ndarray:
    n = z.size
    if n <= window:
        return np.empty(0)
    kernel = np.ones(window) / window
    means = np.convolve(z, kernel, mode="valid")[: n - window]
    return z[window:] - means


def _outlier_include_mdrmd(work: np.ndarray) -> float:
    n = work.size
    inc = 0.01
    top = float(work.max())
    rel_medians: list[float] = []
    fractions: list[float] = []
    j = 0
    while j * inc <= top:
        hits = np.flatnonzero(work >= j * inc) + 1  # 1-based positions
        if hits.size < 2:
            break
        rel_medians.append(float(np.median(hits)) / (n / 2.0) - 1.0)
        fractions.append(hits.size / n)
        j += 1
    kept = [rm for rm, fr in zip(rel_medians, fractions) if fr >= 0.02]
    if not kept:
        return 0.0
    return float(np.median(kept))


def _welch_spectrum(z: np.ndarray) -> tuple[np.ndarray, float]:
    """Rectangular-window periodogram over angular frequencies [0, pi]."""
    n = z.size
    nfft = 1 << max(n - 1, 1).bit_length()
    spec = np.fft.rfft(z, nfft)
    power = (spec.real**2 + spec.imag**2) / (2.0 * math.pi * n)
    return power, 2.0 * math.pi / nfft


def _welch_area(power: np.ndarray, dw: float) -> float:
    head = max(1, power.size // 5)
    return float(power[:head].sum() * dw)


def _welch_centroid(power: np.ndarray, dw: float) -> float:
    csum = np.cumsum(power)
    total = csum[-1]
    if total <= 0:
        return 0.0
    half = total / 2.0
    k = int(np.searchsorted(csum, half))
    return k * dw


def _transition_matrix_sumdiagcov(z: np.ndarray, ac: np.ndarray) -> float:
    n = z.size
    tau = max(1, min(_first_zero(ac), n - 1))
    down = z[::tau]
    m = down.size
    if m < 2:
        return 0.0
    letters = _tercile_letters(down)
    counts = np.zeros((3, 3))
    for a, b in zip(letters[:-1], letters[1:]):
        counts[a, b] += 1.0
    t_mat = counts / (m - 1)
    return float(np.sum(np.var(t_mat, axis=0, ddof=1)))


def _periodicity_wang(z: np.ndarray) -> float:
    n = z.size
    acmax = n // 3
    if acmax < 3:
        return 1.0
    t_norm = 2.0 * np.arange(n) / (n - 1) - 1.0
    trend = np.polyval(np.polyfit(t_norm, z, 3), t_norm)
    resid = z - trend
    if float(np.dot(resid, resid)) <= 0:
        return 1.0
    ac = _acf(resid)[: acmax + 1]
    troughs = [k for k in range(1, acmax) if ac[k] < ac[k - 1] and ac[k] < ac[k + 1]]
    peaks = [k for k in range(1, acmax) if ac[k] > ac[k - 1] and ac[k] > ac[k + 1]]
    for p in peaks:
        before = [t for t in troughs if t < p]
        if not before:
            continue
        t = before[-1]
        if ac[p] - ac[t] >= 0.01 and ac[p] > 0:
            return float(p)
    return 1.0


def _ami_gaussian_fmmi(ac: np.ndarray, n: int) -> float:
    """Lag of the first local minimum of the Gaussian automutual information."""
    max_lag = min(40, n // 2)
    if max_lag < 1:
        return 0.0
    rho2 = np.minimum(ac[1 : max_lag + 1] ** 2, 1.0 - 1e-15)
    ami = -0.5 * np.log(1.0 - rho2)
    for i in range(1, ami.size - 1):  # interior positions; position i is lag i+1
        if ami[i] < ami[i - 1] and ami[i] < ami[i + 1]:
            return float(i + 1)
    return float(max_lag)


def _line_sse(xs: np.ndarray, ys: np.ndarray) -> float:
    m = xs.size
    xm, ym = xs.mean(), ys.mean()
    dx = xs - xm
    varx = float(np.dot(dx, dx))
    if varx <= 0:
        dy = ys - ym
        return float(np.dot(dy, dy))
    slope = float(np.dot(dx, ys - ym)) / varx
    resid = ys - (ym + slope * (xs - xm))
    return float(np.dot(resid, resid))


def _fluct_anal_prop_r1(z: np.ndarray, lag: int, rangefit: bool) -> float:
    cs = np.cumsum(z[lag - 1 :: lag])
    n = cs.size
    if n < 10:
        return 0.0
    raw = np.exp(np.linspace(math.log(5.0), math.log(n / 2.0), 50))
    taus = np.unique(np.floor(raw + 0.5).astype(np.int64))  # half-up, both paths
    taus = taus[(taus >= 5) & (taus <= n // 2)]
    ntt = taus.size
    if ntt < 12:
        return 0.0
    fluct = np.empty(ntt)
    for idx, tau in enumerate(taus):
        n_windows = n // tau
        t = np.arange(tau, dtype=np.float64)
        acc = 0.0
        for w in range(n_windows):
            seg = cs[w * tau : (w + 1) * tau]
            tm, sm = t.mean(), seg.mean()
            dt = t - tm
            slope = float(np.dot(dt, seg - sm)) / float(np.dot(dt, dt))
            resid = seg - (sm + slope * dt)
            if rangefit:
                acc += (resid.max() - resid.min()) ** 2
            else:
                acc += float(np.dot(resid, resid)) / tau
        fluct[idx] = math.sqrt(acc / n_windows)
    if np.any(fluct <= 0):
        return 0.0
    log_t = np.log(taus.astype(np.float64))
    log_f = np.log(fluct)
    best_i, best_sse = -1, math.inf
    for i in range(6, ntt - 5):
        sse = _line_sse(log_t[:i], log_f[:i]) + _line_sse(log_t[i:], log_f[i:])
        if sse < best_sse - 1e-12:
            best_i, best_sse = i, sse
    if best_i < 0:
        return 0.0
    return best_i / ntt


def compute22(x: np.ndarray) -> np.ndarray:
    """The 22 features, in canonical order, over the z-scored input."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    out = np.zeros(22)
    if n < 3:
        return out
    sigma = float(x.std())
    if not math.isfinite(sigma) or sigma == 0.0:
        return out
    z = (x - x.mean()) / sigma
    ac = _acf(z)
    diff = z[1:] - z[:-1]

    out[0] = _histogram_mode(z, 5)
    out[1] = _histogram_mode(z, 10)
    out[2] = _f1ecac(ac)
    out[3] = float(_first_min(ac, default=n))
    out[4] = _histogram_ami(z, tau=2, n_bins=5)
    out[5] = float(np.mean(diff**3))
    out[6] = float(np.mean(np.abs(diff) > 0.04))
    out[7] = float(_longest_run(z > 0))
    out[8] = float(_longest_run(~(diff >= 0)))
    out[9] = _motif_three_hh(z)
    out[10] = _embed2_expfit_meandiff(z, ac)
    res1 = _local_simple_mean_residuals(z, 1)
    out[11] = _first_zero(_acf(res1)) / _first_zero(ac) if res1.size else 0.0
    res3 = _local_simple_mean_residuals(z, 3)
    out[12] = float(np.std(res3, ddof=1)) if res3.size >= 2 else 0.0
    out[13] = _outlier_include_mdrmd(z)
    out[14] = _outlier_include_mdrmd(-z)
    power, dw = _welch_spectrum(z)
    out[15] = _welch_area(power, dw)
    out[16] = _welch_centroid(power, dw)
    out[17] = _transition_matrix_sumdiagcov(z, ac)
    out[18] = _periodicity_wang(z)
    out[19] = _ami_gaussian_fmmi(ac, n)
    out[20] = _fluct_anal_prop_r1(z, lag=2, rangefit=False)
    out[21] = _fluct_anal_prop_r1(z, lag=1, rangefit=True)
    return out
