"""Probability vectors over a k-symbol alphabet."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

INPUT_SUM_TOL = 1e-9
NEG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProbVector:
    """An immutable point of the (k-1)-simplex."""

    entries: np.ndarray

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __len__(self) -> int:
        return self.k

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProbVector):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())

    def tolist(self) -> list[float]:
        return self.entries.tolist()

    def __repr__(self) -> str:
        return f"ProbVector({self.entries.tolist()})"


def _freeze(arr: np.ndarray) -> ProbVector:
    arr = np.array(arr, dtype=np.float64)
    arr.setflags(write=False)
    return ProbVector(arr)


def make_prob_vector(values: Sequence[float], k: int) -> ProbVector:
    """Validate `values` as a distribution on k symbols.

    Entries down to -1e-12 are clamped to zero and the result is
    renormalized, so empirical frequencies with rounding noise are accepted.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != k:
        raise ValueError(f"expected {k} entries, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")
    if np.any(arr < -NEG_TOL):
        raise ValueError(f"negative entry {arr.min()!r} below -{NEG_TOL}")
    total = arr.sum()
    if abs(total - 1.0) > INPUT_SUM_TOL:
        raise ValueError(f"entries sum to {total!r}, not 1")
    arr = np.clip(arr, 0.0, None)
    return _freeze(arr / arr.sum())


def uniform(k: int) -> ProbVector:
    if k < 2:
        raise ValueError("alphabet size must be at least 2")
    return _freeze(np.full(k, 1.0 / k))


def sample_simplex(k: int, rng, size: int | None = None):
    """Uniform draw(s) from the simplex via normalized exponentials.

    With `size=None` a single ProbVector is returned; otherwise a raw
    ``(size, k)`` array, which is what the batched optimizers consume.
    """
    if k < 2:
        raise ValueError("alphabet size must be at least 2")
    rng = np.random.default_rng(rng)
    if size is None:
        x = rng.standard_exponential(k)
        return _freeze(x / x.sum())
    x = rng.standard_exponential((size, k))
    return x / x.sum(axis=1, keepdims=True)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row of `v` onto the probability simplex."""
    v = np.asarray(v, dtype=np.float64)
    flat = v.reshape(-1, v.shape[-1])
    k = flat.shape[1]
    u = -np.sort(-flat, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    idx = np.arange(1, k + 1)
    cond = u - css / idx > 0
    rho = k - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(flat.shape[0]), rho] / (rho + 1)
    out = np.maximum(flat - theta[:, None], 0.0)
    return out.reshape(v.shape)
