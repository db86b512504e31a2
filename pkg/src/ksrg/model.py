"""Kernels, profiles and the pairwise connection probability."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDistanceWarning
from .params import ModelParams


@dataclass(frozen=True)
class MarkedVertex:
    id: int
    position: tuple
    mark: float = 1.0

    def __post_init__(self):
        if self.mark < 1:
            raise ValueError(f"marks are >= 1, got {self.mark}")


def kernel_eval(kernel, w1, w2, d=1, sigma=None):
    """Evaluate a kernel on two marks.

    ``kernel`` is either ``"sum"``, ``"interpolation"`` (then ``sigma`` is
    required) or a :class:`ModelParams`. Works elementwise on arrays.
    """
    if isinstance(kernel, ModelParams):
        sigma = kernel.sigma
        d = kernel.d
        kernel = kernel.kernel
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    if kernel == "sum":
        out = (w1 ** (1.0 / d) + w2 ** (1.0 / d)) ** d
    elif kernel == "interpolation":
        if sigma is None:
            raise ValueError("the interpolation kernel needs sigma")
        out = np.maximum(w1, w2) * np.minimum(w1, w2) ** sigma
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    return out[()] if out.ndim == 0 else out


def profile_eval(params: ModelParams, s):
    """Profile applied to s = beta * kernel / distance^d (elementwise)."""
    s = np.asarray(s, dtype=float)
    if params.threshold:
        out = np.where(s >= 1.0, params.p, 0.0)
    else:
        out = params.p * np.minimum(1.0, s) ** params.alpha
    return out[()] if out.ndim == 0 else out


def connection_probs(xu, xv, wu, wv, params: ModelParams):
    """Vectorised connection probability for aligned arrays of endpoint data.

    ``xu``/``xv`` have shape (..., d). Coincident positions get the cap ``p``.
    """
    xu = np.asarray(xu, dtype=float)
    xv = np.asarray(xv, dtype=float)
    dist2 = np.sum((xu - xv) ** 2, axis=-1)
    distd = dist2 ** (params.d / 2.0)
    kap = kernel_eval(params, wu, wv)
    bk = params.beta * np.asarray(kap, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if params.threshold:
            out = np.where(bk >= distd, params.p, 0.0)
        else:
            ratio = np.where(distd > 0, bk / np.where(distd > 0, distd, 1.0), np.inf)
            out = params.p * np.minimum(1.0, ratio) ** params.alpha
    out = np.where(distd == 0, params.p, out)
    return out


def connection_prob(u: MarkedVertex, v: MarkedVertex, params: ModelParams) -> float:
    xu = np.asarray(u.position, dtype=float)
    xv = np.asarray(v.position, dtype=float)
    if xu.shape != (params.d,) or xv.shape != (params.d,):
        raise ValueError(f"positions must have {params.d} coordinates")
    dist2 = float(np.dot(xu - xv, xu - xv))
    if dist2 == 0.0:
        warnings.warn(
            f"vertices {u.id} and {v.id} share a position; probability capped at p",
            DegenerateDistanceWarning,
            stacklevel=2,
        )
        return float(params.p)
    distd = dist2 ** (params.d / 2.0)
    bk = params.beta * float(kernel_eval(params, u.mark, v.mark))
    if params.threshold:
        return float(params.p) if bk >= distd else 0.0
    return float(params.p * min(1.0, bk / distd) ** params.alpha)


def mark_sf(params: ModelParams, w):
    """P(W >= w) for the mark law."""
    w = np.asarray(w, dtype=float)
    if math.isinf(params.tau):
        out = np.where(w <= 1.0, 1.0, 0.0)
    else:
        out = np.where(w <= 1.0, 1.0, w ** (-(params.tau - 1.0)))
    return out[()] if out.ndim == 0 else out
