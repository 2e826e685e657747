"""Randomized covering partitions of [k]^ell.

A block is a product A_{s_1} x ... x A_{s_ell} of cyclic windows of size
k-3, so every coordinate projection of a block has at most k-3 symbols and
any k-2 words of a block collide in every coordinate.  Words are tuples of
symbols in 1..k.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .verdict import Verdict

MAX_WORDS = 10_000_000

Word = tuple[int, ...]


def block_count_bound(k: int, ell: int, epsilon: float) -> int:
    """floor((k/(k-3) + epsilon)^ell)."""
    # the 1e-9 keeps exact powers such as 3.0**3 from flooring down
    return math.floor((k / (k - 3) + epsilon) ** ell + 1e-9)


def window_set(k: int, i: int) -> frozenset[int]:
    """The cyclic window {i, i+1, ..., i+k-4} in 1..k."""
    if k < 5:
        raise ValueError("windows need k >= 5")
    if not 1 <= i <= k:
        raise ValueError(f"window start {i} outside 1..{k}")
    return frozenset((i - 1 + t) % k + 1 for t in range(k - 3))


@dataclass
class CoverPartition:
    k: int
    ell: int
    epsilon: float
    blocks: list[frozenset[Word]]
    generator_strings: list[Word] = field(default_factory=list)
    h: int | None = None

    def __post_init__(self):
        if self.h is None:
            self.h = block_count_bound(self.k, self.ell, self.epsilon)

    def block_of(self) -> dict[Word, int]:
        return {w: b for b, block in enumerate(self.blocks) for w in block}

    def to_dict(self) -> dict:
        if self.k > 9:
            raise ValueError("digit-string serialization needs k <= 9")
        return {
            "k": self.k,
            "ell": self.ell,
            "epsilon": self.epsilon,
            "h": self.h,
            "blocks": [sorted("".join(map(str, w)) for w in b) for b in self.blocks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CoverPartition":
        try:
            k, ell, eps = int(data["k"]), int(data["ell"]), float(data["epsilon"])
            blocks = [
                frozenset(tuple(int(c) for c in word) for word in block)
                for block in data["blocks"]
            ]
            h = int(data["h"]) if data.get("h") is not None else None
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed partition data: {exc}") from exc
        return cls(k=k, ell=ell, epsilon=eps, blocks=blocks, h=h)

    @classmethod
    def from_json(cls, text: str) -> "CoverPartition":
        return cls.from_dict(json.loads(text))


class CoverageError(RuntimeError):
    """Raised when no sampled family covers [k]^ell within the attempt budget."""


def _all_words(k: int, ell: int) -> np.ndarray:
    if k**ell > MAX_WORDS:
        raise ValueError(f"k^ell = {k**ell} exceeds the {MAX_WORDS} word guard")
    grids = np.indices((k,) * ell).reshape(ell, -1).T
    return grids + 1


def build_cover(k: int, ell: int, epsilon: float, rng, max_attempts: int = 100) -> CoverPartition:
    """Sample h window products until they cover [k]^ell, then disjointify.

    Each word goes to the lowest-index generator block containing it; empty
    blocks are dropped.  Raises CoverageError after `max_attempts` failures.
    """
    if k < 5:
        raise ValueError("covering needs k >= 5")
    if ell < 1:
        raise ValueError("ell must be positive")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if max_attempts < 1:
        raise ValueError("max_attempts must be positive")
    rng = np.random.default_rng(rng)
    h = block_count_bound(k, ell, epsilon)
    words = _all_words(k, ell)
    for _ in range(max_attempts):
        strings = rng.integers(1, k + 1, size=(h, ell))
        owner = np.full(len(words), -1)
        for b, s in enumerate(strings):
            inside = (((words - s) % k) <= k - 4).all(axis=1)
            owner[inside & (owner < 0)] = b
        if (owner >= 0).all():
            break
    else:
        raise CoverageError(
            f"no cover of [{k}]^{ell} with h={h} blocks in {max_attempts} attempts"
        )
    blocks, gens = [], []
    for b in range(h):
        members = words[owner == b]
        if len(members):
            blocks.append(frozenset(map(tuple, members.tolist())))
            gens.append(tuple(strings[b].tolist()))
    return CoverPartition(k, ell, epsilon, blocks, gens, h)


def verify_partition(part: CoverPartition) -> Verdict:
    """Exhaustive check of the partition conditions, listing every violation."""
    k, ell = part.k, part.ell
    violations = []
    seen: dict[Word, int] = {}
    for b, block in enumerate(part.blocks):
        for w in sorted(block):
            if len(w) != ell or not all(1 <= c <= k for c in w):
                violations.append({"kind": "bad_word", "block": b, "word": list(w)})
                continue
            if w in seen:
                violations.append(
                    {"kind": "overlap", "word": list(w), "blocks": [seen[w], b]}
                )
            else:
                seen[w] = b
        for i in range(ell):
            proj = sorted({w[i] for w in block if len(w) == ell})
            if len(proj) > k - 3:
                violations.append(
                    {"kind": "projection", "block": b, "coordinate": i + 1, "symbols": proj}
                )
    if k**ell <= MAX_WORDS:
        for w in itertools.product(range(1, k + 1), repeat=ell):
            if w not in seen:
                violations.append({"kind": "uncovered", "word": list(w)})
    else:
        violations.append({"kind": "too_large", "words": k**ell})
    bound = block_count_bound(k, ell, part.epsilon)
    if len(part.blocks) > bound:
        violations.append({"kind": "block_count", "count": len(part.blocks), "bound": bound})
    return Verdict(ok=not violations, violations=violations)


def _collides_everywhere(tup) -> bool:
    return all(len({w[i] for w in tup}) < len(tup) for i in range(len(tup[0])))


def collision_check(part: CoverPartition, samples: int | None, rng=None) -> Verdict:
    """Check that k-2 words drawn from one block collide in every coordinate.

    With ``samples=None`` every (k-2)-subset of every block is checked.
    """
    m = part.k - 2
    eligible = [sorted(b) for b in part.blocks if len(b) >= m]
    if not eligible:
        raise ValueError(f"no block has at least {m} words")
    violations = []
    checked = 0
    if samples is None:
        for block in eligible:
            for tup in itertools.combinations(block, m):
                checked += 1
                if not _collides_everywhere(tup):
                    violations.append({"kind": "no_collision", "words": [list(w) for w in tup]})
    else:
        rng = np.random.default_rng(rng)
        for _ in range(samples):
            block = eligible[rng.integers(len(eligible))]
            pick = rng.choice(len(block), size=m, replace=False)
            tup = [block[j] for j in sorted(pick)]
            checked += 1
            if not _collides_everywhere(tup):
                violations.append({"kind": "no_collision", "words": [list(w) for w in tup]})
    return Verdict(ok=not violations, violations=violations, info={"checked": checked})


def expected_uncovered(k: int, ell: int, h: int) -> float:
    """Expected number of words missed by h random window products."""
    return k**ell * (1 - ((k - 3) / k) ** ell) ** h
