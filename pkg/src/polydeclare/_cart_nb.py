"""Numba split-search kernels; arithmetic mirrors ``_cart_np`` exactly.

Gini values come from integer class counts through the same float expression
as the numpy twins, so both backends pick identical splits including ties.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["best_numeric_split", "best_ternary_split"]

_JIT_OPTS = dict(cache=True, nogil=True)


@njit(**_JIT_OPTS)
def best_numeric_split(values, labels, n_classes):
    n = values.shape[0]
    order = np.argsort(values)
    counts = np.zeros(n_classes, dtype=np.int64)
    total = np.zeros(n_classes, dtype=np.int64)
    for i in range(n):
        total[labels[i]] += 1
    best_gini = np.inf
    best_thr = 0.0
    valid = False
    n_f = float(n)
    for i in range(n - 1):
        counts[labels[order[i]]] += 1
        lo = values[order[i]]
        hi = values[order[i + 1]]
        if lo == hi:
            continue
        nl = float(i + 1)
        nr = n_f - nl
        sl = 0.0
        sr = 0.0
        for c in range(n_classes):
            left_c = counts[c]
            right_c = total[c] - left_c
            sl += float(left_c * left_c)
            sr += float(right_c * right_c)
        gini = (nl - sl / nl + nr - sr / nr) / n_f
        if gini < best_gini:
            best_gini = gini
            best_thr = (lo + hi) / 2.0
            valid = True
    return best_gini, best_thr, valid


@njit(**_JIT_OPTS)
def best_ternary_split(frame, onehot):
    n, m = frame.shape
    k = onehot.shape[1]
    best_gini = np.full(m, np.inf)
    best_thr = np.zeros(m)
    valid = np.zeros(m, dtype=np.bool_)
    n_f = float(n)
    c_m1 = np.zeros(k, dtype=np.int64)
    c_0 = np.zeros(k, dtype=np.int64)
    c_1 = np.zeros(k, dtype=np.int64)
    total = np.zeros(k, dtype=np.int64)
    for c in range(k):
        s = 0
        for i in range(n):
            s += onehot[i, c]
        total[c] = s
    for j in range(m):
        for c in range(k):
            c_m1[c] = 0
            c_0[c] = 0
            c_1[c] = 0
        for i in range(n):
            cell = frame[i, j]
            for c in range(k):
                if onehot[i, c] == 1:
                    if cell == -1:
                        c_m1[c] += 1
                    elif cell == 0:
                        c_0[c] += 1
                    else:
                        c_1[c] += 1
                    break
        n_m1 = 0
        n_0 = 0
        n_1 = 0
        for c in range(k):
            n_m1 += c_m1[c]
            n_0 += c_0[c]
            n_1 += c_1[c]
        for cand in range(3):
            if cand == 0:
                if not (n_m1 > 0 and n_0 > 0):
                    continue
                thr = -0.5
            elif cand == 1:
                if not (n_m1 > 0 and n_0 == 0 and n_1 > 0):
                    continue
                thr = 0.0
            else:
                if not (n_0 > 0 and n_1 > 0):
                    continue
                thr = 0.5
            nl_i = n_m1 if cand <= 1 else n_m1 + n_0
            nl = float(nl_i)
            nr = n_f - nl
            sl = 0.0
            sr = 0.0
            for c in range(k):
                left_c = c_m1[c] if cand <= 1 else c_m1[c] + c_0[c]
                right_c = (total[c] - left_c)
                sl += float(left_c * left_c)
                sr += float(right_c * right_c)
            gini = (nl - sl / nl + nr - sr / nr) / n_f
            if gini < best_gini[j]:
                best_gini[j] = gini
                best_thr[j] = thr
                valid[j] = True
    return best_gini, best_thr, valid
