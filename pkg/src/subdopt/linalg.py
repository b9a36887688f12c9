"""Dense SPD moment-matrix machinery.

Moment matrices here are sums Q = sum_i z_i z_i^T over selected rows,
where z_i = (1, x_i^T)^T.  The Cholesky factor is carried alongside Q so
that determinants, trial swaps and commits all run in O(p^2) instead of
O(p^3) refactorizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular


class SingularMomentError(Exception):
    """The selected rows do not span: Cholesky factorization failed."""


class DowndateError(Exception):
    """Rank-one downdate would break positive definiteness."""


def as_indices(sel):
    """Accept a Selection object or a plain index array."""
    return np.asarray(getattr(sel, "indices", sel), dtype=np.intp)


def augment(x):
    """Prepend the intercept column of ones: rows x_i -> z_i = (1, x_i)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return np.column_stack([np.ones(x.shape[0]), x])


@dataclass
class MomentState:
    dim: int
    q: np.ndarray        # (dim, dim) symmetric
    chol: np.ndarray     # lower triangular, q = chol @ chol.T
    log_det: float
    count: int

    def copy(self):
        return MomentState(self.dim, self.q.copy(), self.chol.copy(),
                           self.log_det, self.count)


def build_moment(x, sel):
    """Assemble the moment matrix of the selected rows and factor it.

    Raises SingularMomentError when the selection is rank deficient.
    """
    idx = as_indices(sel)
    if idx.size < 1:
        raise ValueError("selection must contain at least one row")
    if np.unique(idx).size != idx.size:
        raise ValueError("selection indices must be distinct")
    z = augment(np.asarray(x, dtype=float)[idx])
    q = z.T @ z
    try:
        chol = np.linalg.cholesky(q)
    except np.linalg.LinAlgError as exc:
        raise SingularMomentError(
            f"moment matrix of {idx.size} rows is singular") from exc
    # LAPACK can hand back a rounding-noise pivot for an exactly singular
    # matrix; reject pivots below the scale of accumulated rounding.
    tol = q.shape[0] * np.finfo(float).eps * np.max(np.diag(q))
    if np.any(np.diag(chol) ** 2 <= tol):
        raise SingularMomentError(
            f"moment matrix of {idx.size} rows is numerically singular")
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return MomentState(q.shape[0], q, chol, log_det, int(idx.size))


def _chol_update(L, v):
    """In-place rank-one update of a lower Cholesky factor: LL^T + vv^T."""
    v = np.array(v, dtype=float)
    n = v.size
    for j in range(n):
        r = math.hypot(L[j, j], v[j])
        c = r / L[j, j]
        s = v[j] / L[j, j]
        L[j, j] = r
        if j + 1 < n:
            L[j + 1:, j] = (L[j + 1:, j] + s * v[j + 1:]) / c
            v[j + 1:] = c * v[j + 1:] - s * L[j + 1:, j]


def _chol_downdate(L, v):
    """In-place rank-one downdate LL^T - vv^T via hyperbolic rotations.

    Raises DowndateError when the result would not be positive definite.
    """
    v = np.array(v, dtype=float)
    n = v.size
    for j in range(n):
        d = (L[j, j] - v[j]) * (L[j, j] + v[j])
        if d <= 0.0:
            raise DowndateError("downdate breaks positive definiteness")
        r = math.sqrt(d)
        c = r / L[j, j]
        s = v[j] / L[j, j]
        L[j, j] = r
        if j + 1 < n:
            L[j + 1:, j] = (L[j + 1:, j] - s * v[j + 1:]) / c
            v[j + 1:] = c * v[j + 1:] - s * L[j + 1:, j]


def rank_one_update(state, z, direction="add"):
    """Return a new state with q +/- zz^T, updating the factor in O(p^2)."""
    z = np.asarray(z, dtype=float)
    if z.size != state.dim:
        raise ValueError("row dimension does not match state")
    new = state.copy()
    if direction == "add":
        _chol_update(new.chol, z)
        new.q += np.outer(z, z)
        new.count += 1
    elif direction == "remove":
        _chol_downdate(new.chol, z)
        new.q -= np.outer(z, z)
        new.count -= 1
    else:
        raise ValueError(f"unknown direction {direction!r}")
    new.log_det = 2.0 * float(np.sum(np.log(np.diag(new.chol))))
    return new


def swap_ratio(state, z_out, z_in):
    """det(Q - z_out z_out^T + z_in z_in^T) / det(Q), by two lemma steps.

    Returns a non-positive value when the swap is inadmissible.  The
    composition is valid even when the intermediate (after removal) is
    singular, since the determinant identity is polynomial.
    """
    L = state.chol
    u = solve_triangular(L, np.asarray(z_out, dtype=float), lower=True)
    a = 1.0 - u @ u
    if a < -1e-9:
        # z_out is not contained in the state; removal is illegitimate.
        return -np.inf
    v = solve_triangular(L, np.asarray(z_in, dtype=float), lower=True)
    c = v @ v
    d = u @ v
    return a * (1.0 + c) + d * d


def swap_delta_logdet(state, z_out, z_in):
    """log det after swapping z_out for z_in, minus log det before.

    Inadmissible swaps (singular result) come back as -inf so callers can
    reject them uniformly.  The state is not mutated.
    """
    ratio = swap_ratio(state, z_out, z_in)
    # Ratios at rounding-noise scale are singular results in disguise.
    if not ratio > 1e-12:
        return -np.inf
    return math.log(ratio)


def log_det(state):
    return state.log_det


def trace_inverse(state):
    """trace(Q^{-1}) via a triangular solve; equals the eigenvalue sum."""
    w = solve_triangular(state.chol, np.eye(state.dim), lower=True)
    return float(np.sum(w * w))


@dataclass
class CovarianceSummary:
    means: np.ndarray   # per-covariate means of the selected rows
    cov: np.ndarray     # p x p covariance with divisor k


def covariance_summary(x, sel):
    """Means and covariance (divisor k) of the selected covariate rows."""
    idx = as_indices(sel)
    if idx.size < 2:
        raise ValueError("need at least 2 selected rows")
    xs = np.asarray(x, dtype=float)[idx]
    means = xs.mean(axis=0)
    xc = xs - means
    cov = (xc.T @ xc) / idx.size
    return CovarianceSummary(means, cov)
