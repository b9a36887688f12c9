"""Evaluation criteria for a selected subdata set.

Efficiencies are normalized so that a two-level orthogonal array with
entries in {-1, +1} scores exactly 1 on both; for data scaled to [-1, 1]
they lie in (0, 1].  The planar convex-hull diagnostic compares subdata
coverage to full-data coverage for a covariate pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (as_indices, build_moment, covariance_summary,
                     trace_inverse)


@dataclass
class EfficiencyReport:
    gen_variance: float   # det of the selection's covariance matrix
    d_eff: float
    a_eff: float
    log_det_q: float


@dataclass
class MseReport:
    mse_intercept: float
    mse_slopes: float


def efficiency(x, sel):
    """Generalized variance, D-efficiency and A-efficiency of a selection."""
    idx = as_indices(sel)
    k = idx.size
    state = build_moment(x, idx)
    p1 = state.dim
    d_eff = math.exp(state.log_det / p1) / k
    a_eff = p1 / (k * trace_inverse(state))
    sign, logdet_cov = np.linalg.slogdet(covariance_summary(x, idx).cov)
    gen_var = float(sign * math.exp(logdet_cov))
    return EfficiencyReport(gen_var, d_eff, a_eff, state.log_det)


def mse(beta_hat, beta_true):
    """Squared-error split into intercept and slope components."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta_true = np.asarray(beta_true, dtype=float)
    if beta_hat.shape != beta_true.shape:
        raise ValueError(
            f"shape mismatch: {beta_hat.shape} vs {beta_true.shape}")
    diff = beta_hat - beta_true
    return MseReport(float(diff[0] ** 2), float(diff[1:] @ diff[1:]))


def hull_2d(points):
    """Convex hull of planar points by the monotone chain, plus its area.

    Returns (vertices, area) with vertices in counterclockwise order.
    Collinear inputs collapse to the two extreme endpoints and area 0.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("need at least one point")
    uniq = np.unique(pts, axis=0)  # lexicographic sort as a side effect
    if uniq.shape[0] == 1:
        return uniq, 0.0

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def half(chain_pts):
        chain = []
        for pt in chain_pts:
            while len(chain) >= 2 and cross(chain[-2], chain[-1], pt) <= 0:
                chain.pop()
            chain.append(pt)
        return chain

    lower = half(uniq)
    upper = half(uniq[::-1])
    verts = np.array(lower[:-1] + upper[:-1])
    xs, ys = verts[:, 0], verts[:, 1]
    area = 0.5 * abs(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1)))
    return verts, float(area)
