"""Thickened two-dimensional Cantor encoding of bit layouts.

The right half of a layout is read as a ternary expansion with digits 0 and 2
(``X``), the left half likewise (``Y``).  A configuration owns the closed box
``[X - 3^-(|x|+1), X] x [Y - 3^-(|y|+1), Y]`` and is encoded by the centre
of that box.  Decoding peels one digit per axis per step; the residual bands
are

    [-1/3, 0]   stop (all further digits are 0)
    (0, 1/3]    digit 0, continue with 3u
    [5/9, 1]    digit 1, continue with 3(u - 2/3)
    (1/3, 5/9)  gap, no configuration lives there
"""
from __future__ import annotations

import csv
import io
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import BudgetExceeded, GapPoint, MalformedLayout, ShapeMismatch
from .genshift import BiInfBits, StateCoding, bits_to_config, config_to_bits
from .machines import Configuration, TuringMachine, tape_configurations

Rat = Fraction
THIRD = Fraction(1, 3)
GAP_LO, GAP_HI = Fraction(1, 3), Fraction(5, 9)


@dataclass(frozen=True)
class Region:
    x_lo: Fraction
    x_hi: Fraction
    y_lo: Fraction
    y_hi: Fraction

    def __post_init__(self):
        for name in ("x_lo", "x_hi", "y_lo", "y_hi"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.x_lo > self.x_hi or self.y_lo > self.y_hi:
            raise ValueError(f"empty region {self}")

    @property
    def width(self) -> Fraction:
        return self.x_hi - self.x_lo

    @property
    def height(self) -> Fraction:
        return self.y_hi - self.y_lo

    def area(self) -> Fraction:
        return self.width * self.height

    def diam(self) -> Fraction:
        """Longest side (sup-metric diameter)."""
        return max(self.width, self.height)

    def has_interior(self) -> bool:
        return self.x_lo < self.x_hi and self.y_lo < self.y_hi

    def contains(self, pt) -> bool:
        x, y = pt
        return self.x_lo <= x <= self.x_hi and self.y_lo <= y <= self.y_hi

    def interior_contains(self, pt) -> bool:
        x, y = pt
        return self.x_lo < x < self.x_hi and self.y_lo < y < self.y_hi

    def contains_region(self, other: "Region") -> bool:
        return (self.x_lo <= other.x_lo and other.x_hi <= self.x_hi
                and self.y_lo <= other.y_lo and other.y_hi <= self.y_hi)

    def intersects(self, other: "Region") -> bool:
        """Closed boxes share at least one point."""
        return (self.x_lo <= other.x_hi and other.x_lo <= self.x_hi
                and self.y_lo <= other.y_hi and other.y_lo <= self.y_hi)

    def interiors_intersect(self, other: "Region") -> bool:
        return (self.x_lo < other.x_hi and other.x_lo < self.x_hi
                and self.y_lo < other.y_hi and other.y_lo < self.y_hi)

    def corners(self):
        return (self.x_lo, self.y_lo), (self.x_hi, self.y_hi)

    def as_strings(self):
        return tuple(str(v) for v in (self.x_lo, self.x_hi, self.y_lo, self.y_hi))


@dataclass(frozen=True)
class CodecParams:
    coding: StateCoding
    depth_budget: int = 256

    def __post_init__(self):
        if self.coding.k < 1:
            raise ShapeMismatch("k must be >= 1")
        if self.depth_budget < self.coding.k + 4:
            raise ShapeMismatch("depth_budget must be >= k + 4")

    @property
    def k(self) -> int:
        return self.coding.k

    @classmethod
    def for_machine(cls, tm: TuringMachine, depth_budget: int = 256) -> "CodecParams":
        return cls(StateCoding.for_machine(tm), depth_budget)


# -------------------------------------------------------------- lengths

def len_x(right_bits: Sequence[int]) -> int:
    """``max{k >= 1 : s_{k-1} = 1}``, 0 for the zero string."""
    for i in range(len(right_bits) - 1, -1, -1):
        if right_bits[i]:
            return i + 1
    return 0


def len_y(left_bits: Sequence[int]) -> int:
    """``max{k >= 1 : s_{-k} = 1}``; ``left_bits[j]`` is bit ``-(j+1)``."""
    return len_x(left_bits)


def len_x_scan(right_bits: Sequence[int], k: int) -> int:
    """Look-ahead form of :func:`len_x` for valid layouts.

    Scans for the first ``000`` after the head symbol instead of locating the
    last 1 globally.  Valid layouts never contain ``000`` inside a tape
    segment, so the first such run marks the end of the right tape.
    """
    def bit(i):
        return right_bits[i] if i < len(right_bits) else 0

    if any(bit(i) for i in range(k + 2, k + 6)):
        j = k + 2
        while bit(j + 1) or bit(j + 2) or bit(j + 3):
            j += 1
        return j + 1
    for j in range(k + 2, 0, -1):
        if bit(j - 1):
            return j
    return 0


def len_y_scan(left_bits: Sequence[int]) -> int:
    """``min{j >= 0 : s_{-j-1} s_{-j-2} s_{-j-3} = 000}``."""
    def bit(j):
        return left_bits[j] if j < len(left_bits) else 0

    j = 0
    while bit(j) or bit(j + 1) or bit(j + 2):
        j += 1
    return j


# ---------------------------------------------------------- coordinates

def coord_X(right_bits: Sequence[int]) -> Fraction:
    total = Fraction(0)
    p = THIRD
    for b in right_bits[:len_x(right_bits)]:
        if b:
            total += 2 * p
        p /= 3
    return total


def coord_Y(left_bits: Sequence[int]) -> Fraction:
    return coord_X(left_bits)


def x_interval(right_bits: Sequence[int]):
    X = coord_X(right_bits)
    return X - THIRD ** (len_x(right_bits) + 1), X


def y_interval(left_bits: Sequence[int]):
    Y = coord_Y(left_bits)
    return Y - THIRD ** (len_y(left_bits) + 1), Y


def region_of_bits(b: BiInfBits) -> Region:
    return Region(*x_interval(b.right), *y_interval(b.left))


def encode_bits(b: BiInfBits):
    r = region_of_bits(b)
    return ((r.x_lo + r.x_hi) / 2, (r.y_lo + r.y_hi) / 2)


def region(c: Configuration, p: CodecParams) -> Region:
    return region_of_bits(config_to_bits(c, p.coding))


def encode(c: Configuration, p: CodecParams):
    return encode_bits(config_to_bits(c, p.coding))


# ------------------------------------------------------------- decoding

def decode_axis(u, budget: int = 256) -> tuple:
    """Digits of one coordinate; raises GapPoint or BudgetExceeded."""
    u = Fraction(u)
    if u < -THIRD or u > 1:
        raise GapPoint(f"{u} is outside [-1/3, 1]")
    digits = []
    while True:
        if u <= 0:
            return tuple(digits)
        if len(digits) >= budget:
            raise BudgetExceeded(f"more than {budget} digits")
        if u <= GAP_LO:
            digits.append(0)
            u = 3 * u
        elif u >= GAP_HI:
            digits.append(1)
            u = 3 * (u - Fraction(2, 3))
        else:
            raise GapPoint(f"residual {u} lies in the gap (1/3, 5/9)")


def decode_bits(pt, budget: int = 256) -> BiInfBits:
    x, y = pt
    return BiInfBits(decode_axis(y, budget), decode_axis(x, budget))


def decode(pt, p: CodecParams) -> Configuration:
    return bits_to_config(decode_bits(pt, p.depth_budget), p.coding)


# ---------------------------------------------------------- diagnostics

def all_configurations(p: CodecParams, max_len: int, alphabet=("0", "1", "2")):
    for q, _ in p.coding.codes:
        yield from tape_configurations(q, alphabet, max_len)


def _prefix_interval(prefix: Sequence[int]):
    """Smallest box side holding every extension of ``prefix``."""
    X = coord_X(prefix)
    return X - THIRD ** (len_x(prefix) + 1), X + THIRD ** len(prefix)


def window_bits(c: Configuration, p: CodecParams, radius: int):
    """Bit prefixes (left, right) of the cells within ``radius`` of the head."""
    b = config_to_bits(c, p.coding)
    n_right = p.k + 2 + 2 * (radius + 1)
    n_left = 2 * max(radius - 1, 0)
    return tuple(b[-j - 1] for j in range(n_left)), tuple(b[i] for i in range(n_right))


def window_region(left_prefix, right_prefix) -> Region:
    return Region(*_prefix_interval(right_prefix), *_prefix_interval(left_prefix))


@dataclass
class CodecReport:
    configs: int = 0
    overlaps: list = field(default_factory=list)          # interiors meet
    boundary_touches: list = field(default_factory=list)  # closed boxes meet, interiors do not
    encode_failures: list = field(default_factory=list)
    max_diam: dict = field(default_factory=dict)          # tape length -> largest side
    max_area: dict = field(default_factory=dict)
    diam_shrinks: bool = True
    area_shrinks: bool = True
    nesting_violations: list = field(default_factory=list)
    window_diam: dict = field(default_factory=dict)       # radius -> largest side

    @property
    def disjoint(self) -> bool:
        return not self.overlaps and not self.boundary_touches


def _sweep(intervals):
    """Pairs of distinct 1-d intervals that meet, split into overlaps and
    boundary touches."""
    ivs = sorted(set(intervals))
    overlaps, touches = [], []
    for i, (lo, hi) in enumerate(ivs):
        for lo2, hi2 in ivs[i + 1:]:
            if lo2 > hi:
                break
            (touches if lo2 == hi else overlaps).append(((lo, hi), (lo2, hi2)))
    return overlaps, touches


def codec_diagnostics(p: CodecParams, max_len: int, alphabet=("0", "1", "2"),
                      window_radius: int = 2) -> CodecReport:
    """Exhaustive checks over every configuration with tape length <= max_len.

    Boxes are products of one x-interval per right half and one y-interval
    per left half, so two boxes meet only if both factors meet.  Disjointness
    of the 1-d families plus injectivity of the layout therefore settles all
    pairs.
    """
    rep = CodecReport()
    by_box = {}
    xs, ys = [], []
    windows = set()
    for c in all_configurations(p, max_len, alphabet):
        rep.configs += 1
        b = config_to_bits(c, p.coding)
        r = region_of_bits(b)
        if r in by_box and by_box[r] != c:
            rep.overlaps.append((by_box[r], c))
        by_box[r] = c
        xs.append((r.x_lo, r.x_hi))
        ys.append((r.y_lo, r.y_hi))
        n = c.tape_length()
        rep.max_diam[n] = max(rep.max_diam.get(n, 0), r.diam())
        rep.max_area[n] = max(rep.max_area.get(n, 0), r.area())
        if not r.interior_contains(encode_bits(b)) or decode(encode_bits(b), p) != c:
            rep.encode_failures.append(c)
        for rad in range(1, window_radius + 1):
            lw, rw = window_bits(c, p, rad)
            windows.add((lw, rw))
            w = window_region(lw, rw)
            rep.window_diam[rad] = max(rep.window_diam.get(rad, 0), w.diam())
            if not w.contains_region(r):
                rep.nesting_violations.append(("region outside its window set", c, rad))
    for ivs in (xs, ys):
        o, t = _sweep(ivs)
        rep.overlaps += o
        rep.boundary_touches += t
    lengths = sorted(rep.max_diam)
    rep.diam_shrinks = all(rep.max_diam[a] > rep.max_diam[b] for a, b in zip(lengths, lengths[1:]))
    rep.area_shrinks = all(rep.max_area[a] > rep.max_area[b] for a, b in zip(lengths, lengths[1:]))
    # window sets are products of 1-d prefix intervals; nested-or-disjoint
    # for both factor families gives it for the products
    for axis in (0, 1):
        prefixes = sorted({w[axis] for w in windows})
        for a, b in itertools.combinations(prefixes, 2):
            ia, ib = _prefix_interval(a), _prefix_interval(b)
            short, long_ = (a, b) if len(a) <= len(b) else (b, a)
            i_short, i_long = (ia, ib) if len(a) <= len(b) else (ib, ia)
            if long_[:len(short)] == short:
                if not (i_short[0] <= i_long[0] and i_long[1] <= i_short[1]):
                    rep.nesting_violations.append(("extension not nested", a, b))
            elif ia[0] < ib[1] and ib[0] < ia[1]:
                rep.nesting_violations.append(("window sets neither nested nor disjoint", a, b))
    return rep


def canonical_bit_strings(depth: int):
    """Bit strings of length <= depth without trailing zeros."""
    out = [()]
    for n in range(1, depth + 1):
        out += [bits + (1,) for bits in itertools.product((0, 1), repeat=n - 1)]
    return out


def regions_to_depth(depth: int):
    """(label, region) for every layout with at most ``depth`` bits per side."""
    out = []
    for left in canonical_bit_strings(depth):
        for right in canonical_bit_strings(depth):
            b = BiInfBits(left, right)
            out.append((f"{b.left_string()}.{b.right_string()}", region_of_bits(b)))
    return out


def dump_regions(rows: Iterable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["config", "x_lo", "x_hi", "y_lo", "y_hi"])
    for label, r in rows:
        w.writerow([str(label), *r.as_strings()])
    return buf.getvalue()


def load_regions(text: str) -> list:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [(row["config"], Region(*(Fraction(row[k]) for k in ("x_lo", "x_hi", "y_lo", "y_hi"))))
            for row in rows]
