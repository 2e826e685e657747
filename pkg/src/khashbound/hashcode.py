"""Codes over [k]: brute-force k-hash verification and Hansel accounting.

Coordinates are 1-based in every public function, matching the way words
are written (symbols 1..k, positions 1..n).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .covering import CoverPartition
from .psipoly import psi
from .simplex import ProbVector, make_prob_vector
from .verdict import Verdict

WORK_GUARD = 10**8

Word = tuple[int, ...]


@dataclass(frozen=True)
class Code:
    k: int
    n: int
    words: tuple[Word, ...]

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("alphabet size must be at least 2")
        if len(set(self.words)) != len(self.words):
            raise ValueError("duplicate codeword")
        for w in self.words:
            if len(w) != self.n:
                raise ValueError(f"word {w} does not have length {self.n}")
            if not all(1 <= c <= self.k for c in w):
                raise ValueError(f"word {w} has a symbol outside 1..{self.k}")

    @classmethod
    def from_words(cls, words: Sequence[Sequence[int]], k: int) -> "Code":
        words = tuple(tuple(int(c) for c in w) for w in words)
        if not words:
            raise ValueError("empty code")
        return cls(k, len(words[0]), words)

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def rate(self) -> float:
        return math.log2(self.size) / self.n

    def array(self) -> np.ndarray:
        return np.array(self.words, dtype=np.int64).reshape(self.size, self.n)


def parse_code(text: str, k: int) -> Code:
    """One word per line, digits 1..k, optionally space separated."""
    if not 2 <= k <= 9:
        raise ValueError("text format supports 2 <= k <= 9")
    words = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        symbols = line.split() if " " in line else list(line)
        try:
            word = tuple(int(s) for s in symbols)
        except ValueError:
            raise ValueError(f"line {lineno}: non-digit symbol in {line!r}") from None
        if any(len(s) != 1 or not 1 <= int(s) <= k for s in symbols):
            raise ValueError(f"line {lineno}: symbol outside 1..{k} in {line!r}")
        if words and len(word) != len(words[0]):
            raise ValueError(f"line {lineno}: length {len(word)}, expected {len(words[0])}")
        words.append(word)
    if not words:
        raise ValueError("no codewords")
    if len(set(words)) != len(words):
        dup = next(w for w, c in Counter(words).items() if c > 1)
        raise ValueError(f"duplicate word {''.join(map(str, dup))}")
    return Code(k, len(words[0]), tuple(words))


def format_code(code: Code) -> str:
    return "\n".join("".join(map(str, w)) for w in code.words) + "\n"


def is_k_hash(code: Code) -> Verdict:
    """Exhaustively check that every k codewords are separated somewhere."""
    k, m = code.k, code.size
    if m < k:
        return Verdict(True, info={"subsets": 0})
    total = math.comb(m, k)
    if total * code.n > WORK_GUARD:
        raise ValueError(f"{total} subsets x {code.n} coordinates exceeds the work guard")
    arr = code.array()
    combos = itertools.combinations(range(m), k)
    chunk = max(1, 2_000_000 // (k * max(code.n, 1)))
    while True:
        block = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, chunk)),
                            dtype=np.int64)
        if block.size == 0:
            break
        idx = block.reshape(-1, k)
        sym = np.sort(arr[idx], axis=1)  # (subsets, k, n)
        separated = (np.diff(sym, axis=1) != 0).all(axis=1).any(axis=1)
        bad = np.flatnonzero(~separated)
        if bad.size:
            witness = [list(code.words[j]) for j in idx[bad[0]]]
            return Verdict(False, [{"kind": "unseparated", "words": witness}],
                           {"subsets": total})
    return Verdict(True, info={"subsets": total})


def empirical_dist(code: Code, i: int) -> ProbVector:
    if not 1 <= i <= code.n:
        raise ValueError(f"coordinate {i} outside 1..{code.n}")
    counts = np.bincount([w[i - 1] for w in code.words], minlength=code.k + 1)[1:]
    return make_prob_vector(counts / code.size, code.k)


@dataclass(frozen=True)
class HanselGraph:
    """Complete bipartite graph left x right plus isolated vertices."""

    anchors: tuple
    coordinate: int | None
    left: tuple
    right: tuple
    isolated: tuple

    @property
    def r(self) -> int:
        return len(self.left) + len(self.right) + len(self.isolated)

    @property
    def vertices(self) -> frozenset:
        return frozenset(self.left) | frozenset(self.right) | frozenset(self.isolated)


def hansel_graph(code: Code, anchors: Sequence[Sequence[int]], i: int) -> HanselGraph:
    """Graph on C minus the anchors joining v, w when the anchors' symbols at
    coordinate i together with v_i, w_i are all distinct."""
    anchors = tuple(tuple(a) for a in anchors)
    if len(anchors) != code.k - 2:
        raise ValueError(f"need {code.k - 2} anchors, got {len(anchors)}")
    if len(set(anchors)) != len(anchors):
        raise ValueError("anchors must be distinct")
    members = set(code.words)
    if any(a not in members for a in anchors):
        raise ValueError("anchors must be codewords")
    if not 1 <= i <= code.n:
        raise ValueError(f"coordinate {i} outside 1..{code.n}")
    rest = tuple(w for w in code.words if w not in set(anchors))
    used = {a[i - 1] for a in anchors}
    if len(used) < len(anchors):
        return HanselGraph(anchors, i, (), (), rest)
    v, w = sorted(set(range(1, code.k + 1)) - used)
    left = tuple(x for x in rest if x[i - 1] == v)
    right = tuple(x for x in rest if x[i - 1] == w)
    isolated = tuple(x for x in rest if x[i - 1] not in (v, w))
    return HanselGraph(anchors, i, left, right, isolated)


def tau_fraction(graph: HanselGraph) -> float:
    """(|left| + |right|) / r.

    A side class can be non-empty while the other is empty (a symbol nobody
    uses); its vertices are still counted, matching the closed form
    |C| (1 - sum of anchor frequencies) / (|C| - k + 2).
    """
    if graph.r == 0:
        return 0.0
    return (len(graph.left) + len(graph.right)) / graph.r


def hansel_check(graphs: Sequence[HanselGraph]) -> Verdict:
    """Verify sum of tau >= log2 r for graphs whose union is complete.

    Raises ValueError when the graphs do not share a vertex set or their
    union misses an edge, since the inequality then says nothing.
    """
    if not graphs:
        raise ValueError("no graphs")
    verts = graphs[0].vertices
    if any(g.vertices != verts for g in graphs):
        raise ValueError("graphs do not share a vertex set")
    order = {v: j for j, v in enumerate(sorted(verts, key=repr))}
    r = len(order)
    covered = np.eye(r, dtype=bool)
    for g in graphs:
        lo = np.array([order[v] for v in g.left], dtype=np.intp)
        hi = np.array([order[v] for v in g.right], dtype=np.intp)
        if lo.size and hi.size:
            covered[np.ix_(lo, hi)] = True
            covered[np.ix_(hi, lo)] = True
    if not covered.all():
        a, b = np.argwhere(~covered)[0]
        names = sorted(verts, key=repr)
        raise ValueError(f"union of graphs misses edge {names[a]!r}-{names[b]!r}")
    total = math.fsum(tau_fraction(g) for g in graphs)
    bound = math.log2(r)
    ok = total >= bound - 1e-9
    info = {"tau_sum": total, "log2_r": bound, "r": r}
    return Verdict(ok, [] if ok else [{"kind": "hansel", **info}], info)


def hansel_graphs(code: Code, anchors) -> list[HanselGraph]:
    return [hansel_graph(code, anchors, i) for i in range(1, code.n + 1)]


def hansel_all_anchors(code: Code) -> Verdict:
    """Run hansel_check for every choice of k-2 anchors of a k-hash code."""
    worst = None
    checked = 0
    for anchors in itertools.combinations(code.words, code.k - 2):
        v = hansel_check(hansel_graphs(code, anchors))
        checked += 1
        slack = v.info["tau_sum"] - v.info["log2_r"]
        if worst is None or slack < worst[0]:
            worst = (slack, anchors, v)
        if not v.ok:
            return Verdict(False, [{"anchors": [list(a) for a in anchors], **v.info}],
                           {"checked": checked})
    info = {"checked": checked}
    if worst is not None:
        info["min_slack"] = worst[0]
        info["worst_anchors"] = [list(a) for a in worst[1]]
    return Verdict(True, info=info)


@dataclass
class SubcodePartition:
    parent: Code
    prefix_len: int
    cells: dict[int, tuple[Word, ...]]
    weights: dict[int, float] = field(default_factory=dict)
    heavy: dict[int, bool] = field(default_factory=dict)

    def cell_dist(self, cell: int, i: int) -> ProbVector:
        return empirical_dist(Code(self.parent.k, self.parent.n, self.cells[cell]), i)


def partition_by_prefix(code: Code, cover: CoverPartition) -> SubcodePartition:
    """Split a code by which cover block contains each word's length-ell prefix."""
    if cover.k != code.k:
        raise ValueError(f"cover alphabet {cover.k} != code alphabet {code.k}")
    if cover.ell > code.n:
        raise ValueError(f"prefix length {cover.ell} exceeds word length {code.n}")
    owner = cover.block_of()
    groups: dict[int, list[Word]] = {}
    for w in code.words:
        prefix = w[: cover.ell]
        if prefix not in owner:
            raise ValueError(f"prefix {prefix} is not covered by the partition")
        groups.setdefault(owner[prefix], []).append(w)
    cells = {b: tuple(ws) for b, ws in sorted(groups.items())}
    weights = {b: len(ws) / code.size for b, ws in cells.items()}
    heavy = {b: len(ws) > code.n for b, ws in cells.items()}
    return SubcodePartition(code, cover.ell, cells, weights, heavy)


def symmetrized_expectation(part: SubcodePartition, i: int) -> float:
    """1/2 sum_{w,u} lam_w lam_u [psi(f_w, f_u) + psi(f_u, f_w)] at coordinate i."""
    if i <= part.prefix_len:
        raise ValueError("coordinate lies inside the prefix")
    if i > part.parent.n:
        raise ValueError(f"coordinate {i} outside 1..{part.parent.n}")
    ids = list(part.cells)
    lam = np.array([part.weights[b] for b in ids])
    dists = np.array([part.cell_dist(b, i).entries for b in ids])
    m = len(ids)
    a = np.repeat(dists, m, axis=0)
    b = np.tile(dists, (m, 1))
    sym = (psi(a, b) + psi(b, a)).reshape(m, m)
    return 0.5 * float(lam @ sym @ lam)


def expected_tau_exact(code: Code, subcode: Sequence[Word], i: int) -> float:
    """Exact mean of tau over uniformly drawn (k-2)-subsets of `subcode`.

    tau depends only on the anchors' symbols at coordinate i, so subsets are
    grouped by their symbol set: a set S of k-2 distinct symbols is hit by
    prod_{a in S} c_a subsets, where c_a counts subcode words with symbol a.
    """
    k = code.k
    subcode = [tuple(w) for w in subcode]
    m = len(subcode)
    if m < k - 2:
        raise ValueError(f"subcode needs at least {k - 2} words")
    if not 1 <= i <= code.n:
        raise ValueError(f"coordinate {i} outside 1..{code.n}")
    sub_counts = Counter(w[i - 1] for w in subcode)
    all_counts = Counter(w[i - 1] for w in code.words)
    r = code.size - k + 2
    total = 0
    for S in itertools.combinations(range(1, k + 1), k - 2):
        ways = math.prod(sub_counts[a] for a in S)
        if ways:
            outside = code.size - sum(all_counts[a] for a in S)
            total += ways * outside
    return total / (math.comb(m, k - 2) * r)
