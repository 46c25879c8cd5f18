"""Independent reference implementations used to cross-check the package.

Everything here is deliberately naive: scalar loops, no numpy vectorization,
no shared helpers with the package.  When a test pins an expected value, it
was produced (or is recomputed) by one of these.
"""

from __future__ import annotations

import math
import re


# --- Interval / run helpers -------------------------------------------------


def true_runs(flags, start: int = 1) -> list[tuple[int, int]]:
    """Maximal runs of truthy values as inclusive 1-based (begin, end) pairs."""
    out = []
    begin = None
    for offset, flag in enumerate(flags):
        t = start + offset
        if flag and begin is None:
            begin = t
        elif not flag and begin is not None:
            out.append((begin, t - 1))
            begin = None
    if begin is not None:
        out.append((begin, start + len(flags) - 1))
    return out


def linear_scan_contains(intervals, t: int) -> bool:
    """Reference for the stabbing query: walk every interval."""
    for iv in intervals:
        if iv.begin <= t <= iv.end:
            return True
    return False


# --- Variation definitions (scalar, no numpy) -------------------------------


def variation_value(x, kind: str, t: int, eps: float) -> float:
    """Variation value at 1-based t; mirrors the four pinned definitions."""
    if kind == "i":
        return x[t] - x[t - 1]
    if kind == "a":
        return abs(x[t - 1])
    if kind == "s":
        return abs(x[t] - x[t - 1])
    if kind == "v":
        diff = x[t] - x[t - 1]
        if abs(diff) <= eps:
            return 0.0
        if abs(x[t - 1]) <= eps:
            return math.inf
        return diff / x[t - 1]
    raise ValueError(kind)


def variation_flag(x, kind: str, t: int, eps: float) -> bool:
    if kind == "i":
        return x[t] - x[t - 1] > 0
    if kind == "a":
        return abs(x[t - 1]) <= eps
    if kind in ("s", "v"):
        return abs(x[t] - x[t - 1]) <= eps
    raise ValueError(kind)


def replay_string(x, kind: str, eps: float) -> str:
    """'T'/'F' profile of the kind's predicate over its domain."""
    n = len(x)
    hi = n if kind == "a" else n - 1
    return "".join("T" if variation_flag(x, kind, t, eps) else "F" for t in range(1, hi + 1))


# --- Trend-pattern silhouettes ----------------------------------------------

# Pointwise shape of each trend name over the predicate profile; a mined
# constituent's covered substring must fullmatch its pattern.
PATTERN_REGEX: dict[str, re.Pattern] = {
    name: re.compile(body)
    for name, body in {
        "IncreaseRapidly": r"T+",
        "DecreaseRapidly": r"F+",
        "IncreaseSlowly1": r"FT+",
        "IncreaseSlowly2": r"TFT+",
        "IncreaseSlowly3": r"T+FT",
        "IncreaseSlowly4": r"T+F",
        "DecreaseSlowly1": r"F+T",
        "DecreaseSlowly2": r"F+TF",
        "DecreaseSlowly3": r"FTF+",
        "DecreaseSlowly4": r"TF+",
        "HighVolatility3": r"FT+F",
        "HighVolatility4": r"TF+T",
    }.items()
}

LABEL_SHAPE = re.compile(r"^([A-Za-z0-9]+)\(dim_(\d+)\^([iasv])\)$")


# --- Metrics ----------------------------------------------------------------


def naive_metrics(truth, predicted) -> dict:
    """Accuracy + macro precision/recall/F1, computed pair by pair."""
    classes = sorted(set(truth) | set(predicted))
    correct = sum(1 for t, p in zip(truth, predicted) if t == p)
    per = {}
    for c in classes:
        tp = sum(1 for t, p in zip(truth, predicted) if t == c and p == c)
        fp = sum(1 for t, p in zip(truth, predicted) if t != c and p == c)
        fn = sum(1 for t, p in zip(truth, predicted) if t == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per[c] = (precision, recall, f1)
    k = len(classes)
    return {
        "accuracy": correct / len(truth) if truth else 0.0,
        "per_class": per,
        "precision_macro": sum(v[0] for v in per.values()) / k if k else 0.0,
        "recall_macro": sum(v[1] for v in per.values()) / k if k else 0.0,
        "f1_macro": sum(v[2] for v in per.values()) / k if k else 0.0,
    }


# --- Naive summary features (plain Python, scalar loops) --------------------


def _zscore(x) -> list[float]:
    n = len(x)
    mean = sum(x) / n
    var = sum((v - mean) ** 2 for v in x) / n
    sd = math.sqrt(var)
    return [(v - mean) / sd for v in x]


def naive_histogram_mode(x, n_bins: int) -> float:
    """Mode as the mean center of the fullest equal-width bins (z-scored input)."""
    z = _zscore(x)
    lo, hi = min(z), max(z)
    if hi <= lo:
        return lo
    width = (hi - lo) / n_bins
    counts = [0] * n_bins
    for v in z:
        b = int((v - lo) / width)
        if b == n_bins:  # the maximum lands in the last bin
            b -= 1
        counts[b] += 1
    best = max(counts)
    centers = [lo + (i + 0.5) * width for i, c in enumerate(counts) if c == best]
    return sum(centers) / len(centers)


def _naive_acf(z) -> list[float]:
    n = len(z)
    mean = sum(z) / n
    c = [v - mean for v in z]
    denom = sum(v * v for v in c)
    if denom <= 0:
        return [1.0] + [0.0] * (n - 1)
    return [sum(c[i] * c[i + k] for i in range(n - k)) / denom for k in range(n)]


def naive_f1ecac(x) -> float:
    ac = _naive_acf(_zscore(x))
    thresh = 1.0 / math.e
    for k in range(1, len(ac)):
        if ac[k] < thresh:
            return (k - 1) + (thresh - ac[k - 1]) / (ac[k] - ac[k - 1])
    return float(len(ac))


def naive_first_min_ac(x) -> float:
    ac = _naive_acf(_zscore(x))
    for k in range(1, len(ac) - 1):
        if ac[k] < ac[k - 1] and ac[k] < ac[k + 1]:
            return float(k)
    return float(len(x))


def naive_trev(x) -> float:
    z = _zscore(x)
    d = [b - a for a, b in zip(z, z[1:])]
    return sum(v**3 for v in d) / len(d)


def naive_pnn40(x) -> float:
    z = _zscore(x)
    d = [abs(b - a) for a, b in zip(z, z[1:])]
    return sum(1 for v in d if v > 0.04) / len(d)


def naive_longstretch_mean(x) -> float:
    z = _zscore(x)
    best = cur = 0
    for v in z:
        cur = cur + 1 if v > 0 else 0
        best = max(best, cur)
    return float(best)


def naive_longstretch_diff(x) -> float:
    z = _zscore(x)
    best = cur = 0
    for a, b in zip(z, z[1:]):
        cur = cur + 1 if (b - a) < 0 else 0
        best = max(best, cur)
    return float(best)


def naive_motif_three_hh(x) -> float:
    z = _zscore(x)
    srt = sorted(z)
    n = len(z)

    def quantile(q: float) -> float:
        # linear interpolation, matching the numpy default
        pos = q * (n - 1)
        lo = int(math.floor(pos))
        hi = min(lo + 1, n - 1)
        return srt[lo] + (pos - lo) * (srt[hi] - srt[lo])

    q1, q2 = quantile(1.0 / 3.0), quantile(2.0 / 3.0)
    letters = [0 if v <= q1 else (1 if v <= q2 else 2) for v in z]
    counts: dict[tuple[int, int], int] = {}
    for a, b in zip(letters, letters[1:]):
        counts[(a, b)] = counts.get((a, b), 0) + 1
    total = sum(counts.values())
    return -sum((c / total) * math.log(c / total) for c in counts.values())


def naive_outlier_include(x, negate: bool) -> float:
    work = [-v for v in _zscore(x)] if negate else _zscore(x)
    n = len(work)
    top = max(work)
    medians, fractions = [], []
    j = 0
    while j * 0.01 <= top:
        hits = [i + 1 for i, v in enumerate(work) if v >= j * 0.01]
        if len(hits) < 2:
            break
        hits.sort()
        m = len(hits)
        med = hits[m // 2] if m % 2 else (hits[m // 2 - 1] + hits[m // 2]) / 2.0
        medians.append(med / (n / 2.0) - 1.0)
        fractions.append(m / n)
        j += 1
    kept = sorted(rm for rm, fr in zip(medians, fractions) if fr >= 0.02)
    if not kept:
        return 0.0
    m = len(kept)
    return kept[m // 2] if m % 2 else (kept[m // 2 - 1] + kept[m // 2]) / 2.0
