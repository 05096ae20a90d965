"""Shifts of finite type, higher-block graphs, sliding block codes and
sofic acceptance.

Words are strings (or tuples) of single-character symbols; bi-infinite
points are finite-support :class:`~cdsim.genshift.BiInfBits` values read
through a finite window.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .errors import AlphabetMismatch, WindowTooSmall
from .genshift import BiInfBits


@dataclass(frozen=True)
class Sft:
    alphabet: tuple
    forbidden: frozenset

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "forbidden", frozenset(self.forbidden))
        for w in self.forbidden:
            if not w or set(w) - set(self.alphabet):
                raise AlphabetMismatch(f"forbidden word {w!r} is empty or off the alphabet")

    @property
    def window(self) -> int:
        return max((len(w) for w in self.forbidden), default=1)


GOLDEN_MEAN = Sft(("0", "1"), frozenset({"11"}))
FULL_2_SHIFT = Sft(("0", "1"), frozenset())


def _check_word(alphabet, w):
    if set(w) - set(alphabet):
        raise AlphabetMismatch(f"{w!r} uses symbols outside {alphabet}")


def is_allowed(S: Sft, w) -> bool:
    w = "".join(w)
    _check_word(S.alphabet, w)
    return not any(f in w for f in S.forbidden)


def words(alphabet: Sequence[str], n: int) -> Iterable[str]:
    for t in itertools.product(alphabet, repeat=n):
        yield "".join(t)


def count_words_brute(S: Sft, n: int) -> int:
    return sum(1 for w in words(S.alphabet, n) if is_allowed(S, w))


# ---------------------------------------------------------------- graphs

@dataclass(frozen=True)
class LabeledGraph:
    """Directed graph with one output symbol per vertex."""

    vertices: tuple
    edges: frozenset
    labels: Mapping = field(default_factory=dict)

    def successors(self, v) -> list:
        return [b for a, b in self.edges if a == v]

    def adjacency(self) -> list:
        index = {v: i for i, v in enumerate(self.vertices)}
        A = [[0] * len(self.vertices) for _ in self.vertices]
        for a, b in self.edges:
            A[index[a]][index[b]] += 1
        return A

    def essential(self) -> "LabeledGraph":
        """Drop vertices that lie on no bi-infinite walk."""
        vs = set(self.vertices)
        while True:
            es = {(a, b) for a, b in self.edges if a in vs and b in vs}
            keep = {a for a, _ in es} & {b for _, b in es}
            if keep == vs:
                break
            vs = keep
        return LabeledGraph(tuple(v for v in self.vertices if v in vs), frozenset(es),
                            {v: self.labels[v] for v in vs})

    def dump(self) -> str:
        lines = [f"vertex {v} {self.labels[v]}" for v in self.vertices]
        lines += [f"edge {a} {b}" for a, b in sorted(self.edges)]
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "LabeledGraph":
        vertices, labels, edges = [], {}, set()
        for line in text.splitlines():
            parts = line.split("#", 1)[0].split()
            if not parts:
                continue
            if parts[0] == "vertex" and len(parts) == 3:
                vertices.append(parts[1])
                labels[parts[1]] = parts[2]
            elif parts[0] == "edge" and len(parts) == 3:
                edges.add((parts[1], parts[2]))
            else:
                raise ValueError(f"cannot read graph line {line!r}")
        return cls(tuple(vertices), frozenset(edges), labels)


def _matmul(A, B):
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(m) if A[i][k]) for j in range(p)] for i in range(n)]


def matrix_power(A, e: int):
    n = len(A)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    while e:
        if e & 1:
            out = _matmul(out, A)
        A = _matmul(A, A)
        e >>= 1
    return out


def higher_block(S: Sft, N: int) -> LabeledGraph:
    """Vertices are the allowed N-words, edges join overlapping pairs (one
    edge per allowed (N+1)-word); a vertex is labelled by its first symbol."""
    if N < S.window:
        raise WindowTooSmall(f"N = {N} is below the longest forbidden word ({S.window})")
    verts = tuple(w for w in words(S.alphabet, N) if is_allowed(S, w))
    vs = set(verts)
    edges = frozenset((u, u[1:] + a) for u in verts for a in S.alphabet
                      if u[1:] + a in vs and is_allowed(S, u + a))
    return LabeledGraph(verts, edges, {v: v[0] for v in verts})


def count_words(S: Sft, n: int) -> int:
    """Allowed words of length n: brute force below the window, otherwise
    ``1^T A^(n-N) 1`` on the higher-block graph."""
    N = S.window
    if n < N:
        return count_words_brute(S, n)
    A = higher_block(S, N).adjacency()
    if not A:
        return 0
    return sum(map(sum, matrix_power(A, n - N)))


def graph_walk_count(G: LabeledGraph, n_vertices: int) -> int:
    if n_vertices == 0:
        return 1
    A = G.adjacency()
    return sum(map(sum, matrix_power(A, n_vertices - 1))) if A else 0


# ------------------------------------------------------- sliding block codes

@dataclass(frozen=True)
class SlidingBlockCode:
    """``phi(s)_i = rule(s_{i-memory}, ..., s_{i+anticipation})``."""

    memory: int
    anticipation: int
    rule: Union[Mapping, Callable]

    @property
    def width(self) -> int:
        return self.memory + self.anticipation + 1

    def local(self, block) -> str:
        block = tuple(block)
        return self.rule(block) if callable(self.rule) else self.rule[block]


def sliding_block_apply(code: SlidingBlockCode, b, window: Optional[tuple] = None):
    """On a finite word: the output at every position where the block fits.
    On a BiInfBits point: the output at positions ``window[0] .. window[1]-1``."""
    if window is None:
        w = tuple(b)
        out = [code.local(w[i:i + code.width]) for i in range(len(w) - code.width + 1)]
        return "".join(str(s) for s in out) if isinstance(b, str) else tuple(out)
    lo, hi = window
    return tuple(code.local(tuple(b[j] for j in range(i - code.memory, i + code.anticipation + 1)))
                 for i in range(lo, hi))


def xor_code() -> SlidingBlockCode:
    return SlidingBlockCode(0, 1, lambda blk: str(int(blk[0]) ^ int(blk[1])) if isinstance(blk[0], str)
                            else blk[0] ^ blk[1])


def shift_code() -> SlidingBlockCode:
    """Reads ``s_{i+1}``: the left shift as a 2-block code."""
    return SlidingBlockCode(0, 1, lambda blk: blk[1])


def identity_code() -> SlidingBlockCode:
    return SlidingBlockCode(0, 0, lambda blk: blk[0])


# ------------------------------------------------------------------- sofic

def sofic_accepts(G: LabeledGraph, w) -> bool:
    """Some walk on the essential part of G emits ``w`` (subset construction)."""
    G = G.essential()
    w = tuple(w)
    _check_word(set(G.labels.values()), w)
    if not G.vertices:
        return False
    current = set(G.vertices)
    for i, sym in enumerate(w):
        if i:
            current = {b for a, b in G.edges if a in current}
        current = {v for v in current if G.labels[v] == sym}
        if not current:
            return False
    return True


def sofic_language_brute(G: LabeledGraph, n: int) -> set:
    """Every label word of an n-vertex walk on the essential graph, by
    explicit enumeration of walks."""
    G = G.essential()
    if n == 0:
        return {""} if G.vertices else set()
    out = set()
    succ = {v: G.successors(v) for v in G.vertices}

    def walk(v, acc):
        acc = acc + G.labels[v]
        if len(acc) == n:
            out.add(acc)
            return
        for u in succ[v]:
            walk(u, acc)

    for v in G.vertices:
        walk(v, "")
    return out


def even_shift() -> LabeledGraph:
    """Runs of 1s between two 0s have even length."""
    return LabeledGraph(("a", "b", "c"),
                        frozenset({("a", "a"), ("a", "b"), ("b", "c"), ("c", "b"), ("c", "a")}),
                        {"a": "0", "b": "1", "c": "1"})


def induced_graph(S: Sft, code: SlidingBlockCode) -> LabeledGraph:
    """Presentation of the image of S under a block code: the higher-block
    graph on blocks of the code's width, labelled by the local rule."""
    N = max(S.window, code.width)
    G = higher_block(S, N)
    if N != code.width:
        raise WindowTooSmall("the code must be at least as wide as the forbidden words")
    return LabeledGraph(G.vertices, G.edges, {v: str(code.local(tuple(v))) for v in G.vertices})


# ----------------------------------------------------------------- files

def parse_sft(text: str) -> Sft:
    """``alphabet: 0, 1`` plus one or more ``forbid: 11, 101`` lines."""
    alphabet, forbidden = None, set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition(":")
        items = [v.strip() for v in value.split(",") if v.strip()]
        if key.strip() == "alphabet":
            alphabet = tuple(items)
        elif key.strip() == "forbid":
            forbidden.update(items)
        else:
            raise ValueError(f"cannot read {line!r}")
    if alphabet is None:
        raise ValueError("missing alphabet line")
    return Sft(alphabet, frozenset(forbidden))


def dump_sft(S: Sft) -> str:
    lines = ["alphabet: " + ", ".join(S.alphabet)]
    if S.forbidden:
        lines.append("forbid: " + ", ".join(sorted(S.forbidden)))
    return "\n".join(lines) + "\n"
