"""Zero-normalized cross-correlation with a compiled core and a NumPy
fallback, selected once at import.

Set ``STEREOBENCH_PURE_PYTHON=1`` to force the fallback (used by the
benchmark and by tests comparing the two paths).
"""

from __future__ import annotations

import os

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

_VAR_EPS = 1e-12


def _zncc_map_numpy(search: np.ndarray, template: np.ndarray) -> np.ndarray:
    search = np.ascontiguousarray(search, dtype=np.float64)
    template = np.ascontiguousarray(template, dtype=np.float64)
    th, tw = template.shape
    if th > search.shape[0] or tw > search.shape[1]:
        raise ValueError("template larger than search region")
    n = th * tw
    t_zero = template - template.sum() / n
    t_var = float((t_zero * t_zero).sum())
    t_norm = np.sqrt(t_var) if t_var > _VAR_EPS else 0.0

    windows = sliding_window_view(search, (th, tw))
    w_sum = windows.sum(axis=(-2, -1))
    w_sq = np.einsum("ijkl,ijkl->ij", windows, windows)
    cross = np.einsum("ijkl,kl->ij", windows, t_zero)

    w_var = w_sq - w_sum * w_sum / n
    denom = t_norm * np.sqrt(np.maximum(w_var, 0.0))
    valid = (w_var > _VAR_EPS) & (denom > 0.0)
    out = np.zeros_like(cross)
    np.divide(cross, denom, out=out, where=valid)
    return out


def _zncc_score_numpy(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("patches must have identical shape")
    az = a - a.mean()
    bz = b - b.mean()
    var_a = float((az * az).sum())
    var_b = float((bz * bz).sum())
    if var_a <= _VAR_EPS or var_b <= _VAR_EPS:
        return 0.0
    return float((az * bz).sum() / np.sqrt(var_a * var_b))


_backend = "numpy"
_compiled = None
if not os.environ.get("STEREOBENCH_PURE_PYTHON"):
    try:
        from . import _zncc as _compiled  # type: ignore[attr-defined]
        _backend = "compiled"
    except ImportError:
        _compiled = None


def implementation() -> str:
    """Name of the active backend: 'compiled' or 'numpy'."""
    return _backend


def zncc_map(search: np.ndarray, template: np.ndarray) -> np.ndarray:
    """ZNCC of ``template`` over every placement inside ``search``."""
    if _compiled is not None:
        return _compiled.zncc_map(
            np.ascontiguousarray(search, dtype=np.float64),
            np.ascontiguousarray(template, dtype=np.float64),
        )
    return _zncc_map_numpy(search, template)


def zncc_score(a: np.ndarray, b: np.ndarray) -> float:
    """Scalar ZNCC of two equal-shape patches."""
    if _compiled is not None:
        return _compiled.zncc_score(
            np.ascontiguousarray(a, dtype=np.float64),
            np.ascontiguousarray(b, dtype=np.float64),
        )
    return _zncc_score_numpy(a, b)
