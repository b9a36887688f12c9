"""Initial subdata selectors: uniform, IBOSS and an OSS-style greedy.

All selectors return row indices into the original data and are
deterministic; ties in covariate values break on the lower row index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConstantColumnError(Exception):
    """A covariate column is constant; scaling to [-1, 1] is undefined."""


@dataclass
class Selection:
    indices: np.ndarray
    source: str = "custom"

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.intp)

    def __len__(self):
        return int(self.indices.size)


@dataclass
class ScalingParams:
    lo: np.ndarray   # per-column minimum
    hi: np.ndarray   # per-column maximum


def scale_to_unit_cube(x):
    """Affinely map every column onto [-1, 1]; returns the inverse params."""
    x = np.asarray(x, dtype=float)
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    if np.any(hi <= lo):
        cols = np.flatnonzero(hi <= lo)
        raise ConstantColumnError(f"constant column(s): {cols.tolist()}")
    scaled = 2.0 * (x - lo) / (hi - lo) - 1.0
    return scaled, ScalingParams(lo, hi)


def unscale(x_scaled, params):
    """Inverse of scale_to_unit_cube."""
    return (np.asarray(x_scaled, dtype=float) + 1.0) / 2.0 \
        * (params.hi - params.lo) + params.lo


def uniform_seed(x, k, rng_seed):
    """k distinct indices drawn without replacement, reproducibly."""
    n = np.asarray(x).shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    rng = np.random.default_rng(rng_seed)
    idx = rng.choice(n, size=k, replace=False)
    return Selection(idx, "uniform")


def _smallest(vals, ids, m):
    """Indices (from ids) of the m smallest values, ties on lower id.

    Uses a partial partition so the typical cost is O(len) rather than a
    full sort; only the tied boundary region gets sorted.
    """
    if m <= 0:
        return ids[:0]
    if m >= vals.size:
        order = np.lexsort((ids, vals))
        return ids[order]
    part = np.argpartition(vals, m - 1)[:m]
    thresh = vals[part].max()
    cand = np.flatnonzero(vals <= thresh)
    order = np.lexsort((ids[cand], vals[cand]))
    return ids[cand[order][:m]]


def _largest(vals, ids, m):
    return _smallest(-vals, ids, m)


def iboss_seed(x, k):
    """IBOSS: per covariate, extreme rows at both ends, with exclusion.

    For each covariate in order, r rows with the smallest and r with the
    largest values are taken among not-yet-selected rows.  The base count
    is floor(k / 2p); the remainder is handed out one per extreme starting
    from covariate 1 (small end first) so the total is exactly k.
    """
    x = np.asarray(x, dtype=float)
    n, p = x.shape
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    base = k // (2 * p)
    rem = k - 2 * p * base
    counts = []
    for j in range(p):
        for _ in ("small", "large"):
            counts.append(base + (1 if rem > 0 else 0))
            rem -= 1
    avail = np.ones(n, dtype=bool)
    chosen = []
    for j in range(p):
        for side, m in (("small", counts[2 * j]), ("large", counts[2 * j + 1])):
            ids = np.flatnonzero(avail)
            if ids.size == 0 or m == 0:
                continue
            vals = x[ids, j]
            take = _smallest(vals, ids, m) if side == "small" \
                else _largest(vals, ids, m)
            chosen.append(take)
            avail[take] = False
    idx = np.concatenate(chosen) if chosen else np.empty(0, dtype=np.intp)
    return Selection(idx[:k], "iboss")


def _needs_scaling(x):
    return x.min() < -1.0 - 1e-12 or x.max() > 1.0 + 1e-12


def oss_seed(x, k, prune_fraction=0.0):
    """OSS-style greedy: corner-seeking, sign-dissimilar sequential picks.

    The first point maximizes the squared norm.  Every later point x
    minimizes sum over selected s of (p - |x|^2/2 - |s|^2/2 + m(x, s))^2,
    where m counts coordinates with matching sign.  With prune_fraction
    in (0, 1), that fraction of the remaining smallest-norm candidates is
    dropped after each addition, trading exactness for speed.
    """
    x = np.asarray(x, dtype=float)
    n, p = x.shape
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    xs = scale_to_unit_cube(x)[0] if _needs_scaling(x) else x
    norms2 = np.einsum("ij,ij->i", xs, xs)
    signs = np.sign(xs)
    alive = np.ones(n, dtype=bool)
    loss = np.zeros(n)
    chosen = np.empty(k, dtype=np.intp)
    pick = int(np.argmax(norms2))
    chosen[0] = pick
    alive[pick] = False
    for step in range(1, k):
        s = chosen[step - 1]
        match = np.count_nonzero(signs == signs[s], axis=1)
        loss += (p - norms2 / 2.0 - norms2[s] / 2.0 + match) ** 2
        if prune_fraction > 0.0:
            ids = np.flatnonzero(alive)
            spare = ids.size - (k - step)
            drop = min(int(prune_fraction * ids.size), spare)
            if drop > 0:
                alive[_smallest(norms2[ids], ids, drop)] = False
        pick = int(np.argmin(np.where(alive, loss, np.inf)))
        chosen[step] = pick
        alive[pick] = False
    return Selection(chosen, "oss")
