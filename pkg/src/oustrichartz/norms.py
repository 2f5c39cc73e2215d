"""Weighted mixed Lebesgue norms ``L_t^a L_x^b`` on product quadrature grids."""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatchError, ExponentError


def _check_exponent(e: float, name: str) -> float:
    e = float(e)
    if not (e >= 1.0):
        raise ExponentError(f"{name} must be >= 1, got {e}")
    return e


def weighted_lp(values, weights, p: float, axis: int = -1) -> np.ndarray:
    """``(sum_i w_i |v_i|^p)^{1/p}`` along ``axis``; ``p = inf`` takes the max
    over nodes of positive weight.  Scaled by the maximum so large ``p`` does
    not overflow."""
    p = _check_exponent(p, "exponent")
    v = np.abs(np.asarray(values))
    v = np.moveaxis(v, axis, -1)
    w = np.asarray(weights, dtype=float)
    if w.shape != v.shape[-1:]:
        raise DimensionMismatchError(f"{w.size} weights for axis of length {v.shape[-1]}")
    if math.isinf(p):
        return np.max(np.where(w > 0, v, 0.0), axis=-1)
    peak = np.max(v, axis=-1, keepdims=True)
    safe = np.where(peak > 0, peak, 1.0)
    out = (((v / safe) ** p) @ w) ** (1.0 / p) * safe[..., 0]
    return np.where(peak[..., 0] > 0, out, 0.0)


def mixed_lp(values, time_weights, space_weights, p_time: float, q_space: float) -> float:
    """``|| ||v(t, .)||_{L^q_x} ||_{L^p_t}`` for ``values`` of shape
    ``(time, space)``."""
    inner = weighted_lp(values, space_weights, q_space, axis=-1)
    return float(weighted_lp(inner, time_weights, p_time))


def dual_exponent(p: float) -> float:
    p = _check_exponent(p, "exponent")
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _dual_profile(v: np.ndarray, w: np.ndarray, p: float) -> np.ndarray:
    """Non-negative ``g`` with ``||g||_{p'} = 1`` and ``sum w g v = ||v||_p``
    for non-negative ``v`` (last axis)."""
    norm = weighted_lp(v, w, p)[..., None]
    if math.isinf(p):
        g = np.zeros_like(v)
        idx = np.argmax(np.where(w > 0, v, -np.inf), axis=-1)
        np.put_along_axis(g, idx[..., None], 1.0 / w[idx][..., None], axis=-1)
        return g
    if p == 1.0:
        return np.ones_like(v)
    safe = np.where(norm > 0, norm, 1.0)
    return np.where(norm > 0, (v / safe) ** (p - 1.0), 0.0)


def holder_extremiser(values, time_weights, space_weights, p_time: float,
                      q_space: float) -> np.ndarray:
    """Non-negative ``V`` of unit ``L_t^{p'} L_x^{q'}`` norm attaining
    ``sum w V |v| = ||v||_{L_t^p L_x^q}``."""
    v = np.abs(np.asarray(values, dtype=float))
    tw = np.asarray(time_weights, dtype=float)
    sw = np.asarray(space_weights, dtype=float)
    inner = weighted_lp(v, sw, q_space)
    spatial = _dual_profile(v, sw, q_space)
    temporal = _dual_profile(inner, tw, p_time)
    return temporal[:, None] * spatial
