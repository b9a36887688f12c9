"""Determinant-maximizing point-exchange over a pool of extreme candidates.

Two variants share one engine:

* first-improvement: for each subdata slot, scan the pool in construction
  order and commit the first swap that strictly increases the generalized
  variance, then move on (optionally repeated for several passes);
* scan-all: never break out of the scan, committing every improving swap,
  so each slot ends at the best candidate seen; a single pass suffices.

Trial swaps are scored against the current Cholesky factor in O(p^2) per
candidate (batched per slot), and accepted swaps commit via rank-one
factor updates.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .linalg import (DowndateError, _chol_downdate, _chol_update,
                     as_indices, augment, build_moment)
from .seeding import Selection

#: Relative strict-improvement threshold on the determinant ratio,
#: guarding against cycling on floating-point noise.
REL_IMPROVEMENT = 1e-12


@dataclass
class CandidatePool:
    indices: np.ndarray      # distinct row indices, in construction order
    capacity_K: int

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.intp)

    def __len__(self):
        return int(self.indices.size)


@dataclass
class SwapRecord:
    iteration: int
    slot: int
    pool_pos: int
    accepted: bool
    log_v_before: float
    log_v_after: float


@dataclass
class ExchangeTrace:
    records: list[SwapRecord] = field(default_factory=list)
    iteration_accepts: list[int] = field(default_factory=list)
    initial_log_v: float = 0.0
    final_log_v: float = 0.0
    accepted_swaps: int = 0
    seconds: float = 0.0

    @property
    def initial_v(self):
        return math.exp(self.initial_log_v)

    @property
    def final_v(self):
        return math.exp(self.final_log_v)


def candidate_pool(x, sel, K):
    """Extreme rows per covariate among the unselected data.

    For each covariate in order: the K/2 smallest rows (ascending), then
    the K/2 largest (ascending, maximum last).  Odd K gives the large end
    the extra row.  Rows taken for an earlier covariate are *not*
    excluded, so a row can be appended twice; the final pool keeps unique
    rows by first occurrence.
    """
    if K < 1:
        raise ValueError(f"K must be a positive integer, got {K}")
    x = np.asarray(x, dtype=float)
    n, p = x.shape
    idx = as_indices(sel)
    mask = np.ones(n, dtype=bool)
    mask[idx] = False
    remaining = np.flatnonzero(mask)
    if remaining.size == 0:
        raise ValueError("no unselected rows left to build a pool from")
    n_small = min(K // 2, remaining.size)
    n_large = min(K - K // 2, remaining.size)
    parts = []
    for j in range(p):
        vals = x[remaining, j]
        order = np.lexsort((remaining, vals))
        parts.append(remaining[order[:n_small]])
        parts.append(remaining[order[-n_large:]])
    stacked = np.concatenate(parts)
    _, first = np.unique(stacked, return_index=True)
    pool = stacked[np.sort(first)]
    return CandidatePool(pool, K)


def _log_v(state, k):
    """log generalized variance: log det Q minus (p+1) log k."""
    return state.log_det - state.dim * math.log(k)


def _commit(state, z_out, z_in):
    """Apply q - z_out z_out^T + z_in z_in^T to the state in place.

    Adds first so the factor stays positive definite mid-step; falls back
    to a full refactorization if the downdate is numerically marginal.
    """
    q_new = state.q + np.outer(z_in, z_in) - np.outer(z_out, z_out)
    backup = state.chol.copy()
    try:
        _chol_update(state.chol, z_in)
        _chol_downdate(state.chol, z_out)
    except DowndateError:
        try:
            state.chol = np.linalg.cholesky(q_new)
        except np.linalg.LinAlgError:
            state.chol = backup
            raise
    state.q = q_new
    state.log_det = 2.0 * float(np.sum(np.log(np.diag(state.chol))))


def _exchange(x, seed, K, iterations, first_improvement, pool=None,
              early_stop=False):
    t0 = time.perf_counter()
    x = np.asarray(x, dtype=float)
    idx = as_indices(seed).copy()
    k = idx.size
    state = build_moment(x, idx)
    if pool is None:
        pool = candidate_pool(x, idx, K)
    F = pool.indices.copy()
    Z = augment(x)
    ZF = Z[F]
    trace = ExchangeTrace()
    trace.initial_log_v = _log_v(state, k)
    log_v = trace.initial_log_v

    for it in range(iterations):
        accepts = 0
        for i in range(k):
            zo = Z[idx[i]]
            L = state.chol
            u = solve_triangular(L, zo, lower=True)
            a = 1.0 - u @ u
            W = solve_triangular(L, ZF.T, lower=True)
            c = np.einsum("ij,ij->j", W, W)
            d = u @ W
            # determinant ratio of swapping slot i's occupant for each
            # candidate; scores share the fixed base Q - zo zo^T, so they
            # are comparable across the whole scan.
            score = a * (1.0 + c) + d * d
            if first_improvement:
                ok = np.flatnonzero(score > 1.0 + REL_IMPROVEMENT)
                accepted = [int(ok[0])] if ok.size else []
            else:
                running = np.maximum.accumulate(
                    np.concatenate(([1.0], score)))[:-1]
                accepted = np.flatnonzero(
                    score > running * (1.0 + REL_IMPROVEMENT)).tolist()
            if not accepted:
                continue
            # Chain of committed swaps: each accepted candidate displaces
            # the current occupant into its own pool position.
            occupant = idx[i]
            best = 1.0
            chain = []
            for w in accepted:
                chain.append((w, occupant, F[w], best, score[w]))
                occupant, best = F[w], score[w]
            try:
                _commit(state, zo, Z[occupant])
            except np.linalg.LinAlgError:
                continue  # numerically degenerate; leave the slot alone
            for w, prev_occ, cand, s_before, s_after in chain:
                lv_before = log_v + math.log(s_before)
                lv_after = log_v + math.log(s_after)
                trace.records.append(SwapRecord(
                    it, i, w, True, lv_before, lv_after))
                F[w] = prev_occ
                ZF[w] = Z[prev_occ]
            idx[i] = occupant
            log_v = _log_v(state, k)
            accepts += len(chain)
        trace.iteration_accepts.append(accepts)
        trace.accepted_swaps += accepts
        if accepts == 0 and early_stop:
            break
    trace.final_log_v = log_v
    trace.seconds = time.perf_counter() - t0
    return Selection(idx, seed.source if hasattr(seed, "source") else
                     "custom"), trace


def alg1(x, seed, K, iterations=5, early_stop=False, pool=None):
    """First-improvement exchange, Step 3 repeated `iterations` times.

    With early_stop=True a pass that commits nothing terminates the run
    (the remaining passes would be identical no-ops).
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    sel, trace = _exchange(x, seed, K, iterations, True, pool=pool,
                           early_stop=early_stop)
    sel.source = "alg1"
    return sel, trace


def valg1(x, seed, K, pool=None):
    """Scan-all greedy-chain exchange; a single pass over the slots."""
    sel, trace = _exchange(x, seed, K, 1, False, pool=pool)
    sel.source = "valg1"
    return sel, trace
