"""Pure-numpy split-search kernels for the decision-tree learner.

Both kernels compute weighted Gini impurities from integer class counts with
one shared arithmetic expression, so results are bit-identical to the numba
twins.  Ties break toward the smallest threshold via strict ``<`` scans in
ascending threshold order.
"""

from __future__ import annotations

import numpy as np

__all__ = ["best_numeric_split", "best_ternary_split"]


def best_numeric_split(
    values: np.ndarray, labels: np.ndarray, n_classes: int
) -> tuple[float, float, bool]:
    """Best midpoint threshold for one numeric feature at one node.

    ``values`` float64, ``labels`` int64 in [0, n_classes).  Returns
    (weighted gini, threshold, valid); valid is False when all values tie.
    """
    n = values.shape[0]
    order = np.argsort(values, kind="stable")
    v = values[order]
    y = labels[order]
    cuts = np.nonzero(v[:-1] != v[1:])[0]
    if cuts.size == 0:
        return np.inf, 0.0, False
    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), y] = 1
    prefix = np.cumsum(onehot, axis=0)
    left = prefix[cuts]
    total = prefix[-1]
    right = total[np.newaxis, :] - left
    nl = (cuts + 1).astype(np.float64)
    nr = n - nl
    sl = np.sum(left * left, axis=1).astype(np.float64)
    sr = np.sum(right * right, axis=1).astype(np.float64)
    gini = (nl - sl / nl + nr - sr / nr) / n
    at = int(np.argmin(gini))
    threshold = (v[cuts[at]] + v[cuts[at] + 1]) / 2.0
    return float(gini[at]), float(threshold), True


def best_ternary_split(
    frame: np.ndarray, onehot: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-column best split over a {−1,0,+1} matrix.

    ``frame`` int8 (n × m), ``onehot`` int64 (n × k) class indicators.
    Candidate thresholds are midpoints of consecutive distinct observed
    values: −0.5, 0.0 (only when 0 is absent), 0.5.  Returns per-column
    (gini, threshold, valid).
    """
    n, m = frame.shape
    onehot_f = onehot.astype(np.float64)
    # float matmul hits BLAS; the 0/1 sums stay exact well below 2**53
    c_m1 = ((frame == -1).T.astype(np.float64) @ onehot_f).astype(np.int64)
    c_0 = ((frame == 0).T.astype(np.float64) @ onehot_f).astype(np.int64)
    c_1 = ((frame == 1).T.astype(np.float64) @ onehot_f).astype(np.int64)
    total = onehot.sum(axis=0)
    p_m1 = c_m1.sum(axis=1) > 0
    p_0 = c_0.sum(axis=1) > 0
    p_1 = c_1.sum(axis=1) > 0

    best_gini = np.full(m, np.inf)
    best_thr = np.zeros(m)
    valid = np.zeros(m, dtype=np.bool_)
    for thr, left, ok in (
        (-0.5, c_m1, p_m1 & p_0),
        (0.0, c_m1, p_m1 & ~p_0 & p_1),
        (0.5, c_m1 + c_0, (p_m1 | p_0) & p_1 & p_0),
    ):
        nl = left.sum(axis=1).astype(np.float64)
        nr = n - nl
        right = total[np.newaxis, :] - left
        with np.errstate(divide="ignore", invalid="ignore"):
            sl = np.sum(left * left, axis=1).astype(np.float64)
            sr = np.sum(right * right, axis=1).astype(np.float64)
            gini = (nl - sl / nl + nr - sr / nr) / n
        better = ok & (gini < best_gini)
        best_gini = np.where(better, gini, best_gini)
        best_thr = np.where(better, thr, best_thr)
        valid |= better
    return best_gini, best_thr, valid
