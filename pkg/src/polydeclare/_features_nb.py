"""JIT-compiled twin of :mod:`polydeclare._features_np`.

Same 22 pinned feature definitions, different numerical routes: direct O(n²)
autocorrelation sums instead of FFT, an explicit DFT for the periodogram,
searchsorted binning instead of ``np.histogram``, normal-equation polynomial
fits instead of ``np.polyfit``.  Keeping the routes distinct is deliberate —
agreement between the two paths is a meaningful cross-check, not a tautology.

Import of this module requires numba; :mod:`polydeclare.features` guards it.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_JIT_OPTS = dict(cache=True, nogil=True)

__all__ = ["compute22"]


@njit(**_JIT_OPTS)
def _acf_direct(v):
    n = v.size
    mu = 0.0
    for i in range(n):
        mu += v[i]
    mu /= n
    denom = 0.0
    for i in range(n):
        denom += (v[i] - mu) * (v[i] - mu)
    out = np.zeros(n)
    if denom <= 0.0:
        out[0] = 1.0
        return out
    for k in range(n):
        s = 0.0
        for t in range(n - k):
            s += (v[t] - mu) * (v[t + k] - mu)
        out[k] = s / denom
    return out


@njit(**_JIT_OPTS)
def _first_zero(ac):
    for k in range(1, ac.size):
        if ac[k] <= 0.0:
            return k
    return ac.size


@njit(**_JIT_OPTS)
def _bin_index(edges, value):
    j = np.searchsorted(edges, value, side="right") - 1
    if j >= edges.size - 1:  # top edge closes the last bin
        j = edges.size - 2
    if j < 0:
        j = 0
    return j


@njit(**_JIT_OPTS)
def _histogram_mode(z, n_bins):
    lo = z.min()
    hi = z.max()
    if hi <= lo:
        return lo
    edges = np.linspace(lo, hi, n_bins + 1)
    counts = np.zeros(n_bins, dtype=np.int64)
    for i in range(z.size):
        counts[_bin_index(edges, z[i])] += 1
    best = 0
    for b in range(n_bins):
        if counts[b] > best:
            best = counts[b]
    acc = 0.0
    hits = 0
    for b in range(n_bins):
        if counts[b] == best:
            acc += (edges[b] + edges[b + 1]) / 2.0
            hits += 1
    return acc / hits


@njit(**_JIT_OPTS)
def _f1ecac(ac):
    thresh = 1.0 / math.e
    for k in range(1, ac.size):
        if ac[k] < thresh:
            return (k - 1) + (thresh - ac[k - 1]) / (ac[k] - ac[k - 1])
    return float(ac.size)


@njit(**_JIT_OPTS)
def _first_min(values, default):
    for k in range(1, values.size - 1):
        if values[k] < values[k - 1] and values[k] < values[k + 1]:
            return k
    return default


@njit(**_JIT_OPTS)
def _histogram_ami(z, tau, n_bins):
    n = z.size
    if n <= tau:
        return 0.0
    lo = z.min() - 0.1
    hi = z.max() + 0.1
    edges = np.linspace(lo, hi, n_bins + 1)
    joint = np.zeros((n_bins, n_bins))
    m = n - tau
    for t in range(m):
        joint[_bin_index(edges, z[t]), _bin_index(edges, z[t + tau])] += 1.0
    pi = np.zeros(n_bins)
    pj = np.zeros(n_bins)
    for a in range(n_bins):
        for b in range(n_bins):
            joint[a, b] /= m
            pi[a] += joint[a, b]
            pj[b] += joint[a, b]
    ami = 0.0
    for a in range(n_bins):
        for b in range(n_bins):
            p = joint[a, b]
            if p > 0.0:
                ami += p * math.log(p / (pi[a] * pj[b]))
    return ami


@njit(**_JIT_OPTS)
def _longest_true_run(flags):
    best = 0
    cur = 0
    for i in range(flags.size):
        if flags[i]:
            cur += 1
            if cur > best:
                best = cur
        else:
            cur = 0
    return best


@njit(**_JIT_OPTS)
def _quantile_linear(sorted_v, q):
    n = sorted_v.size
    pos = q * (n - 1)
    lo = int(math.floor(pos))
    if lo >= n - 1:
        return sorted_v[n - 1]
    frac = pos - lo
    return sorted_v[lo] + frac * (sorted_v[lo + 1] - sorted_v[lo])


@njit(**_JIT_OPTS)
def _tercile_letters(v):
    s = np.sort(v)
    q1 = _quantile_linear(s, 1.0 / 3.0)
    q2 = _quantile_linear(s, 2.0 / 3.0)
    letters = np.empty(v.size, dtype=np.int64)
    for i in range(v.size):
        if v[i] <= q1:
            letters[i] = 0
        elif v[i] <= q2:
            letters[i] = 1
        else:
            letters[i] = 2
    return letters


@njit(**_JIT_OPTS)
def _motif_three_hh(z):
    letters = _tercile_letters(z)
    counts = np.zeros(9)
    for t in range(letters.size - 1):
        counts[letters[t] * 3 + letters[t + 1]] += 1.0
    total = letters.size - 1
    if total <= 0:
        return 0.0
    hh = 0.0
    for c in range(9):
        if counts[c] > 0.0:
            p = counts[c] / total
            hh -= p * math.log(p)
    return hh


@njit(**_JIT_OPTS)
def _embed2_expfit_meandiff(z, ac):
    n = z.size
    tau = _first_zero(ac)
    if tau > n // 10:
        tau = n // 10
    if tau < 1:
        tau = 1
    m = n - tau - 1
    if m < 2:
        return 0.0
    d = np.empty(m)
    for t in range(m):
        a = z[t + 1] - z[t]
        b = z[t + tau + 1] - z[t + tau]
        d[t] = math.sqrt(a * a + b * b)
    scale = 0.0
    for t in range(m):
        scale += d[t]
    scale /= m
    if scale <= 0.0:
        return 0.0
    n_bins = int(math.ceil(math.sqrt(m)))
    lo = d.min()
    hi = d.max()
    if hi <= lo:
        return 0.0
    edges = np.linspace(lo, hi, n_bins + 1)
    counts = np.zeros(n_bins)
    for t in range(m):
        counts[_bin_index(edges, d[t])] += 1.0
    width = edges[1] - edges[0]
    if width <= 0.0:  # hi - lo can collapse to one ulp and vanish in linspace
        return 0.0
    acc = 0.0
    for b in range(n_bins):
        density = counts[b] / (m * width)
        center = (edges[b] + edges[b + 1]) / 2.0
        fitted = math.exp(-center / scale) / scale
        acc += abs(density - fitted)
    return acc / n_bins


@njit(**_JIT_OPTS)
def _outlier_include_mdrmd(work):
    n = work.size
    inc = 0.01
    top = work.max()
    max_steps = int(top / inc) + 2 if top > 0 else 1
    rel_medians = np.empty(max_steps)
    fractions = np.empty(max_steps)
    used = 0
    j = 0
    while j * inc <= top:
        r = j * inc
        hits = 0
        for i in range(n):
            if work[i] >= r:
                hits += 1
        if hits < 2:
            break
        positions = np.empty(hits)
        pos = 0
        for i in range(n):
            if work[i] >= r:
                positions[pos] = i + 1.0
                pos += 1
        rel_medians[used] = np.median(positions) / (n / 2.0) - 1.0
        fractions[used] = hits / n
        used += 1
        j += 1
    kept = np.empty(used)
    n_kept = 0
    for i in range(used):
        if fractions[i] >= 0.02:
            kept[n_kept] = rel_medians[i]
            n_kept += 1
    if n_kept == 0:
        return 0.0
    return np.median(kept[:n_kept])


@njit(**_JIT_OPTS)
def _welch_power(z):
    n = z.size
    nfft = 1
    while nfft < n:
        nfft <<= 1
    k_count = nfft // 2 + 1
    power = np.empty(k_count)
    for k in range(k_count):
        w = 2.0 * math.pi * k / nfft
        re = 0.0
        im = 0.0
        for t in range(n):
            re += z[t] * math.cos(w * t)
            im -= z[t] * math.sin(w * t)
        power[k] = (re * re + im * im) / (2.0 * math.pi * n)
    return power, 2.0 * math.pi / nfft


@njit(**_JIT_OPTS)
def _welch_area(power, dw):
    head = power.size // 5
    if head < 1:
        head = 1
    acc = 0.0
    for k in range(head):
        acc += power[k]
    return acc * dw


@njit(**_JIT_OPTS)
def _welch_centroid(power, dw):
    total = 0.0
    for k in range(power.size):
        total += power[k]
    if total <= 0.0:
        return 0.0
    half = total / 2.0
    csum = 0.0
    for k in range(power.size):
        csum += power[k]
        if csum >= half:
            return k * dw
    return (power.size - 1) * dw


@njit(**_JIT_OPTS)
def _transition_matrix_sumdiagcov(z, ac):
    n = z.size
    tau = _first_zero(ac)
    if tau > n - 1:
        tau = n - 1
    if tau < 1:
        tau = 1
    m = (n + tau - 1) // tau
    down = np.empty(m)
    for i in range(m):
        down[i] = z[i * tau]
    if m < 2:
        return 0.0
    letters = _tercile_letters(down)
    t_mat = np.zeros((3, 3))
    for i in range(m - 1):
        t_mat[letters[i], letters[i + 1]] += 1.0
    for a in range(3):
        for b in range(3):
            t_mat[a, b] /= m - 1
    total = 0.0
    for col in range(3):
        mean = (t_mat[0, col] + t_mat[1, col] + t_mat[2, col]) / 3.0
        var = 0.0
        for row in range(3):
            var += (t_mat[row, col] - mean) ** 2
        total += var / 2.0
    return total


@njit(**_JIT_OPTS)
def _cubic_detrend(z):
    n = z.size
    design = np.empty((n, 4))
    for i in range(n):
        t = 2.0 * i / (n - 1) - 1.0
        design[i, 0] = 1.0
        design[i, 1] = t
        design[i, 2] = t * t
        design[i, 3] = t * t * t
    gram = design.T @ design
    rhs = design.T @ z.copy()
    coef = np.linalg.solve(gram, rhs)
    return z - design @ coef


@njit(**_JIT_OPTS)
def _periodicity_wang(z):
    n = z.size
    acmax = n // 3
    if acmax < 3:
        return 1.0
    resid = _cubic_detrend(z)
    ss = 0.0
    for i in range(n):
        ss += resid[i] * resid[i]
    if ss <= 0.0:
        return 1.0
    ac = _acf_direct(resid)
    for p in range(1, acmax):
        if ac[p] > ac[p - 1] and ac[p] > ac[p + 1]:  # peak
            for t in range(p - 1, 0, -1):
                if ac[t] < ac[t - 1] and ac[t] < ac[t + 1]:  # preceding trough
                    if ac[p] - ac[t] >= 0.01 and ac[p] > 0.0:
                        return float(p)
                    break
    return 1.0


@njit(**_JIT_OPTS)
def _ami_gaussian_fmmi(ac, n):
    max_lag = min(40, n // 2)
    if max_lag < 1:
        return 0.0
    ami = np.empty(max_lag)
    for k in range(1, max_lag + 1):
        rho2 = ac[k] * ac[k]
        if rho2 > 1.0 - 1e-15:
            rho2 = 1.0 - 1e-15
        ami[k - 1] = -0.5 * math.log(1.0 - rho2)
    for i in range(1, max_lag - 1):
        if ami[i] < ami[i - 1] and ami[i] < ami[i + 1]:
            return float(i + 1)
    return float(max_lag)


@njit(**_JIT_OPTS)
def _line_sse(xs, ys):
    m = xs.size
    xm = 0.0
    ym = 0.0
    for i in range(m):
        xm += xs[i]
        ym += ys[i]
    xm /= m
    ym /= m
    varx = 0.0
    cov = 0.0
    for i in range(m):
        varx += (xs[i] - xm) * (xs[i] - xm)
        cov += (xs[i] - xm) * (ys[i] - ym)
    if varx <= 0.0:
        sse = 0.0
        for i in range(m):
            sse += (ys[i] - ym) * (ys[i] - ym)
        return sse
    slope = cov / varx
    sse = 0.0
    for i in range(m):
        r = ys[i] - (ym + slope * (xs[i] - xm))
        sse += r * r
    return sse


@njit(**_JIT_OPTS)
def _fluct_anal_prop_r1(z, lag, rangefit):
    n_cs = z.size // lag
    if n_cs < 10:
        return 0.0
    cs = np.empty(n_cs)
    acc = 0.0
    for i in range(n_cs):
        acc += z[(i + 1) * lag - 1]
        cs[i] = acc
    lo_l = math.log(5.0)
    hi_l = math.log(n_cs / 2.0)
    if hi_l <= lo_l:
        return 0.0
    taus = np.empty(50, dtype=np.int64)
    n_taus = 0
    for i in range(50):
        raw = math.exp(lo_l + (hi_l - lo_l) * i / 49.0)
        tau = int(math.floor(raw + 0.5))  # half-up, both paths
        if tau < 5 or tau > n_cs // 2:
            continue
        if n_taus > 0 and taus[n_taus - 1] == tau:
            continue
        taus[n_taus] = tau
        n_taus += 1
    if n_taus < 12:
        return 0.0
    fluct = np.empty(n_taus)
    for idx in range(n_taus):
        tau = taus[idx]
        n_windows = n_cs // tau
        tm = (tau - 1) / 2.0
        varx = 0.0
        for t in range(tau):
            varx += (t - tm) * (t - tm)
        total = 0.0
        for w in range(n_windows):
            base = w * tau
            sm = 0.0
            for t in range(tau):
                sm += cs[base + t]
            sm /= tau
            cov = 0.0
            for t in range(tau):
                cov += (t - tm) * (cs[base + t] - sm)
            slope = cov / varx
            if rangefit:
                rmax = -1e300
                rmin = 1e300
                for t in range(tau):
                    r = cs[base + t] - (sm + slope * (t - tm))
                    if r > rmax:
                        rmax = r
                    if r < rmin:
                        rmin = r
                total += (rmax - rmin) ** 2
            else:
                sq = 0.0
                for t in range(tau):
                    r = cs[base + t] - (sm + slope * (t - tm))
                    sq += r * r
                total += sq / tau
        fluct[idx] = math.sqrt(total / n_windows)
    log_t = np.empty(n_taus)
    log_f = np.empty(n_taus)
    for i in range(n_taus):
        if fluct[i] <= 0.0:
            return 0.0
        log_t[i] = math.log(taus[i])
        log_f[i] = math.log(fluct[i])
    best_i = -1
    best_sse = 1e300
    for i in range(6, n_taus - 5):
        sse = _line_sse(log_t[:i], log_f[:i]) + _line_sse(log_t[i:], log_f[i:])
        if sse < best_sse - 1e-12:
            best_i = i
            best_sse = sse
    if best_i < 0:
        return 0.0
    return best_i / n_taus


@njit(**_JIT_OPTS)
def compute22(x):
    n = x.size
    out = np.zeros(22)
    if n < 3:
        return out
    mu = 0.0
    for i in range(n):
        mu += x[i]
    mu /= n
    var = 0.0
    for i in range(n):
        var += (x[i] - mu) * (x[i] - mu)
    var /= n
    if not math.isfinite(var) or var <= 0.0:
        return out
    sigma = math.sqrt(var)
    z = np.empty(n)
    for i in range(n):
        z[i] = (x[i] - mu) / sigma
    ac = _acf_direct(z)
    diff = np.empty(n - 1)
    for i in range(n - 1):
        diff[i] = z[i + 1] - z[i]

    out[0] = _histogram_mode(z, 5)
    out[1] = _histogram_mode(z, 10)
    out[2] = _f1ecac(ac)
    out[3] = float(_first_min(ac, n))
    out[4] = _histogram_ami(z, 2, 5)
    trev = 0.0
    for i in range(n - 1):
        trev += diff[i] ** 3
    out[5] = trev / (n - 1)
    pnn = 0
    for i in range(n - 1):
        if abs(diff[i]) > 0.04:
            pnn += 1
    out[6] = pnn / (n - 1)
    out[7] = float(_longest_true_run(z > 0.0))
    out[8] = float(_longest_true_run(diff < 0.0))
    out[9] = _motif_three_hh(z)
    out[10] = _embed2_expfit_meandiff(z, ac)
    out[11] = _first_zero(_acf_direct(diff)) / _first_zero(ac)
    if n >= 5:
        m3 = n - 3
        res3 = np.empty(m3)
        for t in range(m3):
            res3[t] = z[t + 3] - (z[t] + z[t + 1] + z[t + 2]) / 3.0
        rm = 0.0
        for t in range(m3):
            rm += res3[t]
        rm /= m3
        sq = 0.0
        for t in range(m3):
            sq += (res3[t] - rm) ** 2
        out[12] = math.sqrt(sq / (m3 - 1))
    out[13] = _outlier_include_mdrmd(z)
    out[14] = _outlier_include_mdrmd(-z)
    power, dw = _welch_power(z)
    out[15] = _welch_area(power, dw)
    out[16] = _welch_centroid(power, dw)
    out[17] = _transition_matrix_sumdiagcov(z, ac)
    out[18] = _periodicity_wang(z)
    out[19] = _ami_gaussian_fmmi(ac, n)
    out[20] = _fluct_anal_prop_r1(z, 2, False)
    out[21] = _fluct_anal_prop_r1(z, 1, True)
    return out
