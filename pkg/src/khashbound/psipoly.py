"""Evaluation of psi(g, f) and its symmetrization Psi(p; q).

psi(g, f) sums g_{s1} ... g_{s(k-2)} f_{s(k-1)} over all permutations s of
k symbols.  Grouping permutations by the set S of the first k-2 positions
gives

    psi(g, f) = (k-2)! * sum_S prod_{i in S} g_i * sum_{j not in S} f_j,

and since each S is the complement of a pair {a, b}, the sum has only
C(k, 2) terms.  Every function here broadcasts over leading axes, so a
``(N, k)`` batch of pairs is evaluated in one call.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

NAIVE_K_RANGE = (4, 9)


@lru_cache(maxsize=None)
def _tables(k: int):
    pairs = np.array(list(itertools.combinations(range(k), 2)), dtype=np.intp)
    others = np.array(
        [[i for i in range(k) if i not in pr] for pr in pairs.tolist()], dtype=np.intp
    )
    pair_incidence = np.zeros((len(pairs), k))
    pair_incidence[np.arange(len(pairs))[:, None], pairs] = 1.0
    # leave-one-out: for slot t of `others`, the remaining k-3 indices and a
    # one-hot map from (pair, slot) back to the omitted coordinate
    loo_idx = []
    loo_target = []
    for t in range(k - 2):
        keep = [s for s in range(k - 2) if s != t]
        loo_idx.append(others[:, keep])
        tgt = np.zeros((len(pairs), k))
        tgt[np.arange(len(pairs)), others[:, t]] = 1.0
        loo_target.append(tgt)
    return pairs, others, pair_incidence, loo_idx, loo_target, float(math.factorial(k - 2))


def _pair(g, f):
    g = np.asarray(g, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if g.shape != f.shape:
        raise ValueError(f"dimension mismatch: {g.shape} vs {f.shape}")
    k = g.shape[-1]
    if k < 4:
        raise ValueError("psi needs k >= 4")
    return g, f, k


def psi_naive(g, f) -> float:
    """Literal permutation sum; O(k * k!) and kept as a reference only."""
    g, f, k = _pair(g, f)
    lo, hi = NAIVE_K_RANGE
    if not lo <= k <= hi:
        raise ValueError(f"naive evaluation limited to {lo} <= k <= {hi}")
    perms = _perm_table(k)
    head, last = perms[:, : k - 2], perms[:, k - 2]
    lead = g.shape[:-1]
    gf, ff = g.reshape(-1, k), f.reshape(-1, k)
    chunk = max(1, 20_000_000 // (len(perms) * (k - 2)))
    out = np.empty(gf.shape[0])
    for s in range(0, gf.shape[0], chunk):
        terms = np.prod(gf[s : s + chunk, head], axis=-1) * ff[s : s + chunk, last]
        out[s : s + chunk] = terms.sum(axis=-1)
    return float(out[0]) if not lead else out.reshape(lead)


@lru_cache(maxsize=None)
def _perm_table(k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(k))), dtype=np.intp)


def psi(g, f):
    g, f, k = _pair(g, f)
    pairs, others, _, _, _, fact = _tables(k)
    prods = np.prod(g[..., others], axis=-1)
    fsum = f[..., pairs[:, 0]] + f[..., pairs[:, 1]]
    out = fact * np.sum(prods * fsum, axis=-1)
    return float(out) if out.ndim == 0 else out


def big_psi(p, q):
    """Psi(p; q) = psi(p, q) + psi(q, p)."""
    return psi(p, q) + psi(q, p)


def psi_grad(g, f):
    """Analytic partials of psi: returns ``(d/dg, d/df)``, each shaped like g."""
    g, f, k = _pair(g, f)
    pairs, others, incidence, loo_idx, loo_target, fact = _tables(k)
    prods = np.prod(g[..., others], axis=-1)
    fsum = f[..., pairs[:, 0]] + f[..., pairs[:, 1]]
    d_f = fact * (prods @ incidence)
    d_g = np.zeros_like(g)
    for idx, tgt in zip(loo_idx, loo_target):
        d_g = d_g + (np.prod(g[..., idx], axis=-1) * fsum) @ tgt
    return d_g * fact, d_f


def big_psi_grad(p, q):
    """Partials of Psi(p; q) with respect to p and to q."""
    dpsi_pq_dp, dpsi_pq_dq = psi_grad(p, q)
    dpsi_qp_dq, dpsi_qp_dp = psi_grad(q, p)
    return dpsi_pq_dp + dpsi_qp_dp, dpsi_pq_dq + dpsi_qp_dq
