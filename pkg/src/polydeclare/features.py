"""Constituent payload features: 22 canonical summary statistics + raw extremes.

Backend selection: the numba kernels are used when importable unless the
``POLYDECLARE_NO_NUMBA=1`` environment variable forces the pure-numpy path.
Both backends implement the same pinned definitions; ``active_backend()``
reports which one is live.
"""

from __future__ import annotations

import os

import numpy as np

from . import _features_np

__all__ = [
    "CATCH22_NAMES",
    "EXTRA_NAMES",
    "FEATURE_NAMES",
    "active_backend",
    "feature_vector",
    "feature_payload",
]

CATCH22_NAMES: tuple[str, ...] = (
    "DN_HistogramMode_5",
    "DN_HistogramMode_10",
    "CO_f1ecac",
    "CO_FirstMin_ac",
    "CO_HistogramAMI_even_2_5",
    "CO_trev_1_num",
    "MD_hrv_classic_pnn40",
    "SB_BinaryStats_mean_longstretch1",
    "SB_BinaryStats_diff_longstretch0",
    "SB_MotifThree_quantile_hh",
    "CO_Embed2_Dist_tau_d_expfit_meandiff",
    "FC_LocalSimple_mean1_tauresrat",
    "FC_LocalSimple_mean3_stderr",
    "DN_OutlierInclude_p_001_mdrmd",
    "DN_OutlierInclude_n_001_mdrmd",
    "SP_Summaries_welch_rect_area_5_1",
    "SP_Summaries_welch_rect_centroid",
    "SB_TransitionMatrix_3ac_sumdiagcov",
    "PD_PeriodicityWang_th0_01",
    "IN_AutoMutualInfoStats_40_gaussian_fmmi",
    "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1",
    "SC_FluctAnal_2_rangefit_50_1_logi_prop_r1",
)
EXTRA_NAMES: tuple[str, ...] = ("val_min", "val_max", "val_first", "val_last")
FEATURE_NAMES: tuple[str, ...] = CATCH22_NAMES + EXTRA_NAMES

NO_NUMBA_ENV = "POLYDECLARE_NO_NUMBA"

compute22_numpy = _features_np.compute22
compute22_numba = None
if os.environ.get(NO_NUMBA_ENV, "") != "1":
    try:
        from . import _features_nb

        compute22_numba = _features_nb.compute22
    except ImportError:  # pragma: no cover - exercised only without numba
        compute22_numba = None

_active = compute22_numba if compute22_numba is not None else compute22_numpy


def active_backend() -> str:
    """Which kernel family is live: ``"numba"`` or ``"numpy"``."""
    return "numba" if _active is compute22_numba and compute22_numba is not None else "numpy"


def feature_vector(values: np.ndarray) -> np.ndarray:
    """All 26 features over a raw segment, canonical order, never NaN/inf."""
    x = np.ascontiguousarray(values, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot compute features of an empty segment")
    core = np.asarray(_active(x), dtype=np.float64)
    extras = np.array([x.min(), x.max(), x[0], x[-1]])
    return np.nan_to_num(np.concatenate([core, extras]), nan=0.0, posinf=0.0, neginf=0.0)


def feature_payload(values: np.ndarray) -> dict[str, float]:
    """The feature vector as a name→value map (the constituent payload basis)."""
    vec = feature_vector(values)
    return {name: float(v) for name, v in zip(FEATURE_NAMES, vec)}
